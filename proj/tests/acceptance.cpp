// Acceptance run: one line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dirac/cli.hpp"
#include "dirac/multiplicative_dirac.hpp"
#include "oracle_bridge.hpp"

using namespace dirac;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Q = Rational;
using VQ = linalg::Vector<Q>;
using MQ = linalg::Matrix<Q>;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Records failures without stopping, keeping the first reason.
struct Tally {
  bool pass = true;
  std::string first;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) first = what;
    pass = pass && ok;
  }
};

std::string data(const std::string& name) { return (fs::path(DIRAC_TEST_DATA) / name).string(); }

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  return r;
}

const Registry<Q>& reg() { return catalog_registry<Q>(); }

LieAlgebra aff1_dual() {
  LieAlgebra d("aff1*", 2);
  d.set_bracket(0, 1, {1, 0});
  return d;
}

DiracField<Q> heis_pullback() {
  return pullback_field<Q>(reg().hom("heisenberg3->abelian2"),
                           make_linear_poisson<Q>(reg().chart("abelian2"), aff1_dual()));
}

VQ random_vec(Rng& rng, std::size_t n) {
  VQ v(n);
  for (auto& x : v) x = random_rational(rng);
  return v;
}

// ---- 1 ----------------------------------------------------------------------

Verdict isotropy_suite() {
  Rng rng(1001);
  std::mt19937_64 mrng(1002);
  Tally t;
  std::size_t instances = 0;
  auto record = [&](const linalg::Subspace<Q>& s, std::size_t n, const std::string& what) {
    ++instances;
    t.require(s.dim() == n, what + ": dimension " + std::to_string(s.dim()) + " != " + std::to_string(n));
    t.require(isotropy_residual(s, n) == 0.0, what + ": pairing does not vanish");
  };

  for (int k = 0; k < 60; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k) % 4;
    record(from_bivector(bridge::random_antisymmetric(mrng, n)).space(), n, "from_bivector");
    record(from_two_form(bridge::random_antisymmetric(mrng, n)).space(), n, "from_two_form");
    record(from_distribution(linalg::Subspace<Q>::from_rows(bridge::random_matrix(mrng, 1 + k % n, n))).space(), n,
           "from_distribution");
    const std::size_t m = 1 + static_cast<std::size_t>(k / 4) % 4;
    const auto phi = bridge::random_matrix(mrng, m, n);
    record(forward_image(phi, from_bivector(bridge::random_antisymmetric(mrng, n))).space, m, "forward_image");
    record(backward_image(phi, from_two_form(bridge::random_antisymmetric(mrng, m))).space, n, "backward_image");
  }

  // Field values over every exact chart of dimension <= 4, pullbacks included.
  std::vector<DiracField<Q>> fields;
  for (const auto& name : reg().chart_names()) {
    const auto chart = reg().chart(name);
    const std::size_t n = chart->algebra.dim();
    if (n == 0 || n > 4) continue;
    fields.push_back(make_foliation<Q>(chart, linalg::Subspace<Q>::from_rows(bridge::random_matrix(mrng, 1, n))));
    fields.push_back(make_two_form_graph<Q>(chart, random_vec(rng, wedge_dim(n))));
    if (chart->vector_group) {
      fields.push_back(make_linear_poisson<Q>(chart, catalog::abelian(n)));
      if (n == 2) fields.push_back(make_linear_poisson<Q>(chart, aff1_dual()));
    }
  }
  fields.push_back(make_coboundary_poisson<Q>(reg().chart("aff1"), VQ{1}));
  fields.push_back(make_coboundary_poisson<Q>(reg().chart("aff1"), VQ{Q(-3, 2)}));
  fields.push_back(heis_pullback());
  fields.push_back(pullback_field<Q>(reg().hom("abelian3->abelian2"),
                                     make_linear_poisson<Q>(reg().chart("abelian2"), aff1_dual())));
  fields.push_back(pullback_field<Q>(
      reg().hom("heisenberg3->abelian2"),
      make_foliation<Q>(reg().chart("abelian2"), linalg::Subspace<Q>::span(2, {{1, 2}}))));
  for (const auto& f : fields) {
    for (int k = 0; k < 12; ++k) {
      const GroupPoint<Q> g(f.chart, f.chart->sample(rng));
      record(evaluate(f, g).space(), f.chart->algebra.dim(), to_string(f.kind) + " on " + f.chart->name);
    }
  }
  t.require(instances >= 500, "only " + std::to_string(instances) + " instances");
  return {t.pass, std::to_string(instances) + " instances, n <= 4, tol 0" + (t.pass ? "" : "; " + t.first)};
}

// ---- 2 ----------------------------------------------------------------------

// span{g X} == span{X g} over matrices, directly.
bool bi_invariant_at(const GroupPoint<Q>& g, const linalg::Subspace<Q>& f) {
  const auto& chart = *g.chart;
  const auto gm = embed(g);
  std::vector<VQ> left, right;
  for (std::size_t i = 0; i < f.dim(); ++i) {
    MQ x(chart.matrix_size, chart.matrix_size);
    const auto v = f.basis_vector(i);
    for (std::size_t k = 0; k < v.size(); ++k) x = x + [&] {
      MQ e = chart.basis[k];
      for (std::size_t r = 0; r < e.rows(); ++r)
        for (std::size_t c = 0; c < e.cols(); ++c) e(r, c) *= v[k];
      return e;
    }();
    left.push_back((gm * x).data());
    right.push_back((x * gm).data());
  }
  const std::size_t m = chart.matrix_size * chart.matrix_size;
  return linalg::Subspace<Q>::span(m, left) == linalg::Subspace<Q>::span(m, right);
}

Verdict distribution_suite() {
  const auto chart = reg().chart("heisenberg3");
  Tally t;
  const auto centre = linalg::Subspace<Q>::span(3, {{0, 0, 1}});
  const auto line = linalg::Subspace<Q>::span(3, {{1, 0, 0}});
  const auto good = check_multiplicative_distribution(chart, centre);
  t.require(good.pass && good.bi_invariant, "span{e3} rejected");
  t.require(good.sampling.conclusive && good.sampling.exact, "span{e3}: grid not conclusive");
  t.require(is_ideal(chart->algebra, centre).pass == good.pass, "span{e3}: is_ideal disagrees");

  const auto bad = check_multiplicative_distribution(chart, line);
  t.require(!bad.pass, "span{e1} accepted");
  t.require(bad.witness.has_value(), "span{e1}: no witness");
  t.require(is_ideal(chart->algebra, line).pass == bad.pass, "span{e1}: is_ideal disagrees");
  std::string where;
  if (bad.witness) {
    Params<Q> p;
    for (const auto& s : bad.witness->g) p.push_back(parse_rational(s));
    const GroupPoint<Q> g(chart, p);
    t.require(!bi_invariant_at(g, line), "span{e1}: witness does not reproduce");
    where = " at g = (";
    for (std::size_t i = 0; i < p.size(); ++i) where += (i ? ", " : "") + bad.witness->g[i];
    where += ")";
    const auto again = check_multiplicative_distribution(chart, line);
    t.require(again.witness && again.witness->g == bad.witness->g, "span{e1}: witness changes between runs");
  }
  return {t.pass, "span{e3} passes on " + std::to_string(good.sampling.grid_points) +
                      "-point conclusive grid; span{e1} fails" + where + "; is_ideal agrees" +
                      (t.pass ? "" : "; " + t.first)};
}

// ---- 3 ----------------------------------------------------------------------

Verdict lemma_suite() {
  const auto phi = reg().hom("heisenberg3->abelian2");
  Rng rng(3003);
  Tally t;
  std::size_t composable = 0;
  for (int k = 0; k < 200; ++k) {
    const GroupPoint<Q> g(phi->source, phi->source->sample(rng));
    const GroupPoint<Q> h(phi->source, phi->source->sample(rng));
    const auto pg = apply(*phi, g);
    const auto ph = apply(*phi, h);
    const auto dg = left_differential(*phi, g);
    const auto dh = left_differential(*phi, h);
    const auto x = random_vec(rng, 3);
    const auto y = random_vec(rng, 3);
    const auto beta_h = random_vec(rng, 2);
    const auto xi2 = generalized_from_left(ph, dh * y, beta_h);
    // Every other pair is composable by construction.
    const auto beta_g = k % 2 == 0 ? cotangent_target(Covector<Q>{xi2.base, xi2.covector}) : random_vec(rng, 2);
    const auto xi1 = generalized_from_left(pg, dg * x, beta_g);
    const auto eta1 = generalized_from_left(g, x, dg.transpose() * beta_g);
    const auto eta2 = generalized_from_left(h, y, dh.transpose() * beta_h);
    t.require(phi_related(*phi, eta1, xi1) && phi_related(*phi, eta2, xi2), "constructed pair not phi-related");
    const bool c_up = gt_composable(eta1, eta2);
    const bool c_down = gt_composable(xi1, xi2);
    t.require(c_up == c_down, "composability differs at pair " + std::to_string(k));
    if (c_up && c_down) {
      ++composable;
      t.require(phi_related(*phi, gt_product(eta1, eta2), gt_product(xi1, xi2)),
                "products not phi-related at pair " + std::to_string(k));
    }
  }
  t.require(composable >= 100, "too few composable pairs");
  return {t.pass, "200 pairs (" + std::to_string(composable) +
                      " composable), composability equivalent and products phi-related, exact" +
                      (t.pass ? "" : "; " + t.first)};
}

// ---- 4 ----------------------------------------------------------------------

Verdict pipeline_suite() {
  Tally t;
  const auto r = cli_run({"verify-thm31", "--group", "heisenberg3", "--field", data("pullback-aff1dual.json")});
  t.require(r.code == 0, "verify-thm31 exit code " + std::to_string(r.code));
  std::size_t grid = 0;
  if (!r.out.empty()) {
    const auto rep = json::parse(r.out);
    const auto& ch = rep["characteristic"];
    grid = ch["sampling"]["grid_points"].get<std::size_t>();
    t.require(ch["rank"] == 1 && ch["constant_rank"] == true, "kernel rank not constant 1");
    t.require(ch["k_e"]["generators"] == json::array({json::array({"0", "0", "1"})}), "k_e is not span{e3}");
    t.require(ch["left_coset"] == true && ch["right_coset"] == true, "ker L_g differs from dL_g k_e or dR_g k_e");
    t.require(ch["sampling"]["conclusive_grid"] == true, "characteristic grid not conclusive");
    t.require(rep["quotient_matches_base"] == true, "quotient differs from the base Poisson structure");
    t.require(rep["quotient"]["multiplicative"] == true, "quotient not multiplicative");
    t.require(rep["quotient"]["round_trip"] == true, "pullback of the quotient differs from L");
  }
  // Library-side cross check of the same claims.
  const auto f = heis_pullback();
  const auto q = quotient_poisson(f);
  t.require(q.poisson.kind == FieldKind::poisson_linear && q.poisson.dual == aff1_dual(),
            "quotient is not the aff1-dual linear Poisson structure");
  t.require(check_multiplicative(q.poisson).pass, "check_multiplicative fails on the quotient");
  const auto back = pullback_field<Q>(q.hom, q.poisson);
  SamplingSummary s;
  for (const auto& p : sample_points(*f.chart, 1, degree_bound(f), SamplingOptions{}, s)) {
    const GroupPoint<Q> g(f.chart, p);
    t.require(evaluate(back, g) == evaluate(f, g), "pullback round trip differs");
  }
  return {t.pass, "exit 0; rank 1 with ker = dL(span{e3}) = dR(span{e3}) on " + std::to_string(grid) +
                      " grid points; quotient = base exactly, multiplicative, round trip exact" +
                      (t.pass ? "" : "; " + t.first)};
}

// ---- 5 ----------------------------------------------------------------------

Verdict round_trip_suite() {
  Tally t;
  const auto f = heis_pullback();
  const auto d = extract_infinitesimal_data(f);
  t.require(d.check.pass, "infinitesimal_data_check fails: " + d.check.failure);
  t.require(infinitesimal_data_check(d.algebra, d.k, d.cobracket).pass, "independent data check fails");
  const auto g = integrate_infinitesimal_data(f.chart, d.k, d.cobracket);
  SamplingSummary s;
  const auto points = sample_points(*f.chart, 1, degree_bound(f), SamplingOptions{}, s);
  for (const auto& p : points) {
    const GroupPoint<Q> pt(f.chart, p);
    t.require(evaluate(g, pt) == evaluate(f, pt), "integrated field differs");
  }
  t.require(s.conclusive, "grid not conclusive");
  return {t.pass, "data check passes; integration reproduces L exactly on " + std::to_string(s.grid_points) +
                      " grid + " + std::to_string(s.random_samples) + " random points" +
                      (t.pass ? "" : "; " + t.first)};
}

// ---- 6 ----------------------------------------------------------------------

Verdict two_form_suite() {
  Tally t;
  std::string detail;
  for (const auto* name : {"abelian2", "heisenberg3"}) {
    const auto s = solve_multiplicative_two_forms(reg().chart(name));
    t.require(s.solution_dim == 0, std::string(name) + ": solution space has dimension " + std::to_string(s.solution_dim));
    detail += std::string(detail.empty() ? "" : "; ") + name + " dim 0 (" + std::to_string(s.unknowns) + " unknowns, " +
              std::to_string(s.equations) + " equations)";
  }
  return {t.pass, detail + (t.pass ? "" : "; " + t.first)};
}

// ---- 7 ----------------------------------------------------------------------

Verdict torus_suite() {
  Tally t;
  const auto chart = catalog_registry<double>().chart("torus2");
  const auto f = make_foliation<double>(chart, linalg::Subspace<double>::span(2, {{1.0, std::sqrt(2.0)}}), false);
  SamplingOptions opt;
  opt.samples = 200;
  opt.tolerance = 1e-9;
  const auto rep = check_multiplicative(f, opt);
  t.require(rep.pass, "check_multiplicative fails");
  t.require(rep.sampling.random_samples == 200, "sample count");
  t.require(rep.sampling.max_residual <= 1e-9, "residual above 1e-9");
  std::string message;
  try {
    quotient_poisson(f, HomPtr<double>{}, opt);
    t.require(false, "quotient_poisson returned");
  } catch (const NonClosedSubgroupError& e) {
    message = e.what();
    t.require(message.find("non-closed characteristic subgroup") != std::string::npos, "wrong message");
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1e", rep.sampling.max_residual);
  return {t.pass, "200 samples, max residual " + std::string(buf) + " <= 1e-9; quotient_poisson: non-closed characteristic subgroup" +
                      (t.pass ? "" : "; " + t.first)};
}

// ---- 8 ----------------------------------------------------------------------

Verdict oracle_suite() {
  Tally t;
  std::size_t cobrackets = 0;
  for (const auto& name : catalog::bialgebra_names()) {
    const auto cb = catalog::bialgebra_by_name(name);
    const auto r = cocycle_check(cb);
    const auto w = oracle::cocycle_witness(bridge::tensors(cb));
    t.require(r.pass == !w.has_value() && (!w || r.witness == w), "disagreement on " + name);
    ++cobrackets;
  }
  const auto broken = cocycle_check(catalog::heis3_broken());
  t.require(!broken.pass && broken.witness == std::make_pair<std::size_t, std::size_t>(0, 1),
            "heis3 failing case witness is not (e1,e2)");

  std::mt19937_64 rng(8008);
  const auto names = catalog::names();
  std::size_t fails = 0;
  for (int k = 0; k < 100; ++k) {
    const auto g = catalog::by_name(names[static_cast<std::size_t>(k) % names.size()]);
    const auto cb = bridge::random_cobracket(rng, g, k);
    const auto r = cocycle_check(cb);
    const auto w = oracle::cocycle_witness(bridge::tensors(cb));
    t.require(r.pass == !w.has_value() && (!w || r.witness == w), "disagreement on random cobracket " + std::to_string(k));
    fails += r.pass ? 0 : 1;
    ++cobrackets;
  }

  // Linear algebra against F_5 enumeration, n <= 3.
  using bridge::reduce_space;
  using bridge::to_int;
  const long p = bridge::kPrime;
  std::size_t compared = 0;
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k) % 3;
    const auto a = bridge::random_matrix(rng, 1 + (k / 3) % n, n);
    const auto b = bridge::random_matrix(rng, 1 + (k / 7) % n, n);
    if (!bridge::rank_preserved(a) || !bridge::rank_preserved(b) || !bridge::rank_preserved(bridge::stack(a, b))) continue;
    const auto sa = linalg::Subspace<Q>::from_rows(a);
    const auto sb = linalg::Subspace<Q>::from_rows(b);
    const auto span_a = oracle::span(to_int(a), n, p);
    const auto span_b = oracle::span(to_int(b), n, p);
    auto compare = [&](const linalg::Subspace<Q>& s, const oracle::Space& expect, const char* what) {
      if (auto r = reduce_space(s)) {
        t.require(*r == expect, std::string(what) + " differs from enumeration at instance " + std::to_string(k));
        ++compared;
      }
    };
    compare(sa, span_a, "span");
    compare(linalg::kernel(a), oracle::kernel(to_int(a), n, p), "kernel");
    compare(linalg::intersect(sa, sb), oracle::intersect(span_a, span_b), "intersection");
    compare(linalg::sum(sa, sb), oracle::span(to_int(bridge::stack(a, b)), n, p), "sum");
    compare(linalg::annihilator(sa), oracle::annihilator(span_a, n, p), "annihilator");
    const auto pm = bridge::random_antisymmetric(rng, n);
    const auto l = from_bivector(pm).space();
    if (auto r = reduce_space(l)) {
      t.require(oracle::isotropic(*r, n, p) && oracle::log_size(*r, p) == n, "graph not Dirac over F_5");
      ++compared;
    }
  }
  t.require(compared >= 1000, "too few finite-field comparisons");
  t.require(fails > 0 && fails < 100, "random cobrackets all on one side");
  return {t.pass, std::to_string(cobrackets) + " cobrackets (" + std::to_string(fails) +
                      " failing random) agree with the tensor evaluator, heis3 witness (e1,e2); " +
                      std::to_string(compared) + " F_5 comparisons agree" + (t.pass ? "" : "; " + t.first)};
}

// ---- 9 ----------------------------------------------------------------------

Verdict determinism_suite() {
  Tally t;
  const std::vector<std::vector<std::string>> commands = {
      {"verify-thm31", "--group", "heisenberg3", "--field", data("pullback-aff1dual.json"), "--seed", "17"},
      {"check-multiplicative", "--group", "torus2", "--field", data("torus-irrational.json"), "--samples", "200"},
      {"check-multiplicative", "--group", "heisenberg3", "--field", data("heis-e0-foliation.json"), "--seed", "3"},
      {"check-distribution", "--group", "heisenberg3", "--subspace", data("heis-e0.subspace.json")},
      {"quotient", "--group", "torus2", "--field", data("torus-irrational.json")},
      {"solve-two-forms", "--group", "heisenberg3", "--seed", "9"},
      {"check-cocycle", "heis3_broken"},
  };
  for (const auto& c : commands) {
    const auto a = cli_run(c);
    const auto b = cli_run(c);
    t.require(!a.out.empty() && a.out == b.out && a.code == b.code, c[0] + " output differs between runs");
  }
  return {t.pass, std::to_string(commands.size()) + " commands run twice, reports byte-identical" +
                      (t.pass ? "" : "; " + t.first)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"isotropy and maximality", isotropy_suite},
      {"bi-invariant distributions on heisenberg3", distribution_suite},
      {"phi-related pairs along heisenberg3 -> abelian2", lemma_suite},
      {"verify-thm31 pipeline", pipeline_suite},
      {"extract / integrate round trip", round_trip_suite},
      {"no multiplicative 2-forms", two_form_suite},
      {"torus2 irrational foliation", torus_suite},
      {"oracle equivalence", oracle_suite},
      {"determinism", determinism_suite},
  };
  bool all = true;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all = all && v.pass;
    std::cout << "criterion " << (i + 1) << " " << (v.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": "
              << v.detail << "\n";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (all ? "all criteria pass" : "some criteria FAIL") << " (" << secs << " s)\n";
  return all ? 0 : 1;
}
