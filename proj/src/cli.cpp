#include "dirac/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>

#include <CLI11.hpp>

#include "dirac/io.hpp"

namespace dirac::cli {

namespace {

using io::json;
namespace fs = std::filesystem;

struct Common {
  std::size_t samples = 64;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::size_t grid_cap = 4096;
  bool no_grid = false;
  std::string report;
};

struct Outcome {
  json report;
  bool pass = true;
  std::string summary;
};

// A StructureError that ends the run with exit code 1 and a report.
struct Failure {
  std::string type;
  std::string message;
  json partial;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--samples", c.samples, "random samples (default 64)");
  sub->add_option("--seed", c.seed, "seed for every random draw (default 0)");
  sub->add_option("--tol", c.tol, "tolerance for float charts (overrides DIRAC_LIE_TOL)");
  sub->add_option("--grid-cap", c.grid_cap, "largest conclusive grid evaluated (default 4096)");
  sub->add_flag("--no-grid", c.no_grid, "skip the conclusive grid");
  sub->add_option("--report", c.report, "write the JSON report here instead of stdout");
}

SamplingOptions options_from(const Common& c) {
  SamplingOptions o;
  o.samples = c.samples;
  o.seed = c.seed;
  o.grid = !c.no_grid;
  o.grid_cap = c.grid_cap;
  o.tolerance = c.tol;
  if (!o.tolerance) {
    const char* env = std::getenv("DIRAC_LIE_TOL");
    if (env && *env) {
      char* end = nullptr;
      const double v = std::strtod(env, &end);
      if (end == env || *end != '\0' || !(v >= 0.0)) throw InputError(std::string("bad DIRAC_LIE_TOL '") + env + "'");
      o.tolerance = v;
    }
  }
  return o;
}

json sampling_inputs(const Common& c, const SamplingOptions& o) {
  json in;
  in["samples"] = c.samples;
  in["seed"] = c.seed;
  in["grid"] = o.grid;
  in["grid_cap"] = c.grid_cap;
  in["tolerance_override"] = o.tolerance ? json(*o.tolerance) : json(nullptr);
  return in;
}

bool exact_group(const std::string& name) {
  if (catalog_registry<Rational>().has_chart(name)) return true;
  if (catalog_registry<double>().has_chart(name)) return false;
  throw InputError("unknown group '" + name + "'");
}

template <class F>
auto with_arithmetic(const std::string& group, F&& f) {
  if (exact_group(group)) return f(Rational{});
  return f(double{});
}

template <class T>
DiracField<T> load_field(const std::string& path, const std::string& group) {
  const fs::path p(path);
  return io::field_from_json<T>(io::load_file(p), p.parent_path(), group);
}

// A catalog name or a path to a file.
json name_or_file(const std::string& arg, const std::function<bool(const std::string&)>& is_name) {
  if (fs::exists(arg)) return io::load_file(arg);
  if (is_name(arg)) return arg;
  throw InputError("cannot open '" + arg + "'");
}

bool is_algebra_name(const std::string& s) {
  try {
    catalog::by_name(s);
    return true;
  } catch (const InputError&) {
    return false;
  }
}

bool is_bialgebra_name(const std::string& s) {
  try {
    catalog::bialgebra_by_name(s);
    return true;
  } catch (const InputError&) {
    return false;
  }
}

std::string failure_type(const StructureError& e) {
  if (dynamic_cast<const NonClosedSubgroupError*>(&e)) return "non_closed_subgroup";
  if (dynamic_cast<const LeafSpaceError*>(&e)) return "leaf_space_not_realized";
  if (dynamic_cast<const RankJumpError*>(&e)) return "rank_jump";
  if (dynamic_cast<const IntegrationUnavailableError*>(&e)) return "integration_unavailable";
  if (dynamic_cast<const MultiplicativityError*>(&e)) return "not_multiplicative";
  return "structure";
}

json error_json(const StructureError& e) {
  json out;
  out["type"] = failure_type(e);
  out["message"] = e.what();
  if (const auto* m = dynamic_cast<const MultiplicativityError*>(&e)) out["report"] = io::report_to_json(m->report());
  return out;
}

template <class T>
bool same_on_points(const DiracField<T>& a, const DiracField<T>& b, const std::vector<Params<T>>& points, double tol) {
  for (const auto& pt : points) {
    const GroupPoint<T> g(a.chart, pt);
    const auto la = evaluate(a, g).space();
    const auto lb = evaluate(b, g).space();
    if constexpr (ScalarTraits<T>::exact) {
      (void)tol;
      if (!(la == lb)) return false;
    } else {
      if (!linalg::same_subspace(la, lb, std::max(tol, ScalarTraits<T>::default_tolerance))) return false;
    }
  }
  return true;
}

// ---- verbs ---------------------------------------------------------------

Outcome check_jacobi(const std::string& arg) {
  const auto g = io::algebra_from_json(name_or_file(arg, is_algebra_name));
  const auto r = jacobi_check(g);
  Outcome o;
  o.report["inputs"] = {{"algebra", arg}};
  o.report["algebra"] = io::algebra_to_json(g);
  o.report["result"] = io::report_to_json(r);
  o.pass = r.pass;
  return o;
}

Outcome check_cocycle(const std::string& arg) {
  const auto cb = io::cobracket_from_json(name_or_file(arg, is_bialgebra_name));
  const auto r = bialgebra_check(cb);
  Outcome o;
  o.report["inputs"] = {{"bialgebra", arg}};
  o.report["bialgebra"] = io::cobracket_to_json(cb);
  o.report["result"] = io::report_to_json(r);
  o.pass = r.pass;
  if (!r.cocycle.pass) o.summary = "cocycle condition fails";
  return o;
}

Outcome check_ideal(const std::string& arg, const std::string& subspace) {
  const auto g = io::algebra_from_json(name_or_file(arg, is_algebra_name));
  const auto k = io::subspace_from_json<Rational>(io::load_file(subspace), g.dim());
  const auto r = is_ideal(g, k);
  const bool invariant = is_ad_invariant<Rational>(g, k);
  Outcome o;
  o.report["inputs"] = {{"algebra", arg}, {"subspace", subspace}};
  o.report["subspace"] = io::subspace_to_json(k);
  o.report["result"] = io::report_to_json(r);
  o.report["ad_invariant"] = invariant;
  o.report["criteria_agree"] = invariant == r.pass;
  o.pass = r.pass && invariant == r.pass;
  return o;
}

Outcome check_dirac(const std::string& path) {
  const auto v = io::load_file(path);
  if (!v.is_object() || !v.contains("n") || !v.contains("generators"))
    throw InputError("dirac subspace: expected fields 'n' and 'generators'");
  const auto n = v.at("n").get<std::size_t>();
  const auto space = io::subspace_from_json<Rational>(json{{"generators", v.at("generators")}}, 2 * n);
  const double iso = isotropy_residual(space, n);
  Outcome o;
  o.report["inputs"] = {{"subspace", path}};
  o.report["n"] = n;
  o.report["dim"] = space.dim();
  o.report["maximal"] = space.dim() == n;
  o.report["isotropic"] = iso == 0.0;
  o.report["isotropy_residual"] = iso;
  o.pass = space.dim() == n && iso == 0.0;
  if (o.pass) {
    const DiracSubspace<Rational> l(n, space);
    const auto ker = dirac_kernel(l);
    const auto range = dirac_range(l);
    o.report["kernel"] = io::subspace_to_json(ker);
    o.report["range"] = io::subspace_to_json(range);
    o.report["kernel_plus_range_is_n"] = ker.dim() + range.dim() == n;
    o.pass = ker.dim() + range.dim() == n;
  } else {
    o.summary = space.dim() != n ? "not maximal" : "not isotropic";
  }
  return o;
}

template <class T>
Outcome check_multiplicative_verb(const std::string& group, const std::string& field, const SamplingOptions& opt) {
  const auto f = load_field<T>(field, group);
  const auto r = check_multiplicative(f, opt);
  Outcome o;
  o.report["field"] = io::field_to_json(f);
  o.report["result"] = io::report_to_json(r);
  o.pass = r.pass;
  if (r.witness) o.summary = r.witness->detail;
  return o;
}

template <class T>
Outcome check_distribution_verb(const std::string& group, const std::string& subspace, const SamplingOptions& opt) {
  const auto chart = catalog_registry<T>().chart(group);
  const auto f_e = io::subspace_from_json<T>(io::load_file(subspace), chart->algebra.dim());
  const auto r = check_multiplicative_distribution(chart, f_e, opt);
  Outcome o;
  o.report["subspace"] = io::subspace_to_json(f_e);
  o.report["result"] = io::report_to_json(r);
  o.pass = r.pass;
  if (r.witness) o.summary = r.witness->detail;
  return o;
}

template <class T>
Outcome pullback_verb(const HomPtr<T>& hom, const std::string& base_path, const std::string& output,
                      const SamplingOptions& opt) {
  const auto base = load_field<T>(base_path, hom->target->name);
  const auto f = pullback_field(hom, base, opt);
  const auto after = check_multiplicative(f, opt);
  Outcome o;
  o.report["hom"] = hom->name;
  o.report["field"] = io::field_to_json(f);
  o.report["pullback_multiplicativity"] = io::report_to_json(after);
  o.pass = after.pass;
  if (!output.empty()) io::write_file(output, io::field_to_json(f));
  return o;
}

template <class T>
Outcome quotient_verb(const std::string& group, const std::string& field, const std::string& hom_name,
                      const SamplingOptions& opt) {
  const auto f = load_field<T>(field, group);
  HomPtr<T> hom;
  if (!hom_name.empty()) hom = catalog_registry<T>().hom(hom_name);
  const auto q = quotient_poisson(f, hom, opt);
  Outcome o;
  o.report["characteristic"] = io::report_to_json(q.characteristic);
  o.report["quotient"] = io::report_to_json(q.report);
  o.report["poisson"] = io::field_to_json(q.poisson);
  o.pass = q.report.pass;
  if (q.report.witness) o.summary = q.report.witness->detail;
  return o;
}

template <class T>
Outcome extract_verb(const std::string& group, const std::string& field, const SamplingOptions& opt) {
  const auto f = load_field<T>(field, group);
  const auto d = extract_infinitesimal_data(f, opt);
  Outcome o;
  o.report["infinitesimal_data"] = io::report_to_json(d);
  o.pass = d.check.pass;
  if (!d.check.pass) o.summary = "infinitesimal data check fails at " + d.check.failure;
  return o;
}

ChartPtr<Rational> chart_for_algebra(const LieAlgebra& g, const std::string& group) {
  if (!group.empty()) {
    if (!catalog_registry<Rational>().has_chart(group)) {
      if (catalog_registry<double>().has_chart(group))
        throw IntegrationUnavailableError("integration not available in catalog: " + group +
                                          " has no exact chart and no closed-subgroup quotient");
      throw InputError("unknown group '" + group + "'");
    }
    auto chart = catalog_registry<Rational>().chart(group);
    if (!(chart->algebra == g)) throw InputError("group " + group + " does not have the given Lie algebra");
    return chart;
  }
  const auto& reg = catalog_registry<Rational>();
  if (reg.has_chart(g.name()) && reg.chart(g.name())->algebra == g) return reg.chart(g.name());
  for (const auto& name : reg.chart_names())
    if (reg.chart(name)->algebra == g) return reg.chart(name);
  throw IntegrationUnavailableError("integration not available in catalog: no catalog group has this Lie algebra");
}

Outcome integrate_verb(const std::string& algebra, const std::string& ideal, const std::string& bialgebra,
                       const std::string& group, const std::string& output, const SamplingOptions& opt) {
  const auto g = io::algebra_from_json(name_or_file(algebra, is_algebra_name));
  const auto k = io::subspace_from_json<Rational>(io::load_file(ideal), g.dim());
  const auto cb = io::cobracket_from_json(name_or_file(bialgebra, is_bialgebra_name));
  const auto chart = chart_for_algebra(g, group);
  const auto f = integrate_infinitesimal_data(chart, k, cb, opt);
  const auto back = extract_infinitesimal_data(f, opt);
  Outcome o;
  o.report["group"] = chart->name;
  o.report["field"] = io::field_to_json(f);
  o.report["extracted"] = io::report_to_json(back);
  const bool same_k = back.k == k;
  const bool same_delta = back.cobracket == cb;
  o.report["round_trip"] = {{"k_e", same_k}, {"cobracket", same_delta}};
  o.pass = back.check.pass && same_k && same_delta;
  if (!output.empty()) io::write_file(output, io::field_to_json(f));
  return o;
}

template <class T>
Outcome verify_thm31_verb(const std::string& group, const std::string& field, const SamplingOptions& opt,
                          Failure& partial) {
  const auto f = load_field<T>(field, group);
  Outcome o;
  o.report["field"] = io::field_to_json(f);
  const auto mult = check_multiplicative(f, opt);
  o.report["multiplicativity"] = io::report_to_json(mult);
  partial.partial = o.report;
  if (!mult.pass) {
    o.pass = false;
    o.summary = "field is not multiplicative";
    return o;
  }
  const auto q = quotient_poisson(f, HomPtr<T>{}, opt);
  o.report["characteristic"] = io::report_to_json(q.characteristic);
  o.report["quotient"] = io::report_to_json(q.report);
  o.report["poisson"] = io::field_to_json(q.poisson);
  partial.partial = o.report;
  bool pass = q.characteristic.pass && q.report.pass;

  SamplingSummary summary;
  const auto points = sample_points(*f.chart, 1, degree_bound(f), opt, summary);
  const double tol = summary.tolerance;
  if (f.kind == FieldKind::pullback && f.hom == q.hom) {
    std::vector<Params<T>> ys;
    for (const auto& pt : points) ys.push_back(apply(*q.hom, GroupPoint<T>(f.chart, pt)).params);
    const bool matches = same_on_points(q.poisson, *f.base, ys, tol);
    o.report["quotient_matches_base"] = matches;
    pass = pass && matches;
  }

  const auto d = extract_infinitesimal_data(f, opt);
  o.report["infinitesimal_data"] = io::report_to_json(d);
  partial.partial = o.report;
  pass = pass && d.check.pass;

  if constexpr (ScalarTraits<T>::exact) {
    const auto again = integrate_infinitesimal_data(f.chart, d.k, d.cobracket, opt);
    const bool field_round_trip = same_on_points(again, f, points, tol);
    const auto d2 = extract_infinitesimal_data(again, opt);
    const bool data_round_trip = d2.k == d.k && d2.cobracket == d.cobracket;
    o.report["integration"] = {{"field", io::field_to_json(again)},
                               {"reproduces_field", field_round_trip},
                               {"reproduces_data", data_round_trip},
                               {"points", points.size()}};
    pass = pass && field_round_trip && data_round_trip;
  }
  o.pass = pass;
  return o;
}

Outcome solve_two_forms_verb(const std::string& group, const SamplingOptions& opt) {
  if (!exact_group(group)) throw InputError("solve-two-forms needs an exact chart; " + group + " is float");
  const auto chart = catalog_registry<Rational>().chart(group);
  const auto s = solve_multiplicative_two_forms(chart, opt);
  Outcome o;
  o.report["result"] = io::report_to_json(s);
  o.pass = s.solution_dim == 0;
  if (!o.pass) o.summary = "nonzero multiplicative two-forms found at the sampled points";
  return o;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiplicative Dirac structures on Lie groups", "dirac-lie"};
  app.require_subcommand(1);
  Common common;
  std::string algebra, bialgebra, subspace, group, field, hom, base, output, ideal;

  auto* jac = app.add_subcommand("check-jacobi", "Jacobi identity of a Lie algebra");
  jac->add_option("algebra", algebra, "algebra file or catalog name")->required();
  add_common(jac, common);

  auto* coc = app.add_subcommand("check-cocycle", "cocycle and dual Jacobi conditions of a Lie bialgebra");
  coc->add_option("bialgebra", bialgebra, "bialgebra file or catalog name")->required();
  add_common(coc, common);

  auto* idl = app.add_subcommand("check-ideal", "whether a subspace is an ideal");
  idl->add_option("algebra", algebra, "algebra file or catalog name")->required();
  idl->add_option("--subspace", subspace, "subspace file")->required();
  add_common(idl, common);

  auto* dir = app.add_subcommand("check-dirac", "maximality and isotropy of a linear Dirac structure");
  dir->add_option("subspace", subspace, "Dirac subspace file")->required();
  add_common(dir, common);

  auto* mul = app.add_subcommand("check-multiplicative", "closure of a Dirac field under the groupoid product");
  mul->add_option("--group", group, "catalog group")->required();
  mul->add_option("--field", field, "field file")->required();
  add_common(mul, common);

  auto* dis = app.add_subcommand("check-distribution", "bi-invariance of a left-invariant distribution");
  dis->add_option("--group", group, "catalog group")->required();
  dis->add_option("--subspace", subspace, "F_e file")->required();
  add_common(dis, common);

  auto* pul = app.add_subcommand("pullback", "pull a multiplicative field back along a catalog homomorphism");
  pul->add_option("--hom", hom, "catalog homomorphism")->required();
  pul->add_option("--base", base, "field file on the target group")->required();
  pul->add_option("-o,--output", output, "write the pulled back field here");
  add_common(pul, common);

  auto* quo = app.add_subcommand("quotient", "Poisson structure on the leaf space of the characteristic foliation");
  quo->add_option("--group", group, "catalog group")->required();
  quo->add_option("--field", field, "field file")->required();
  quo->add_option("--hom", hom, "catalog homomorphism realizing the leaf space (searched when omitted)");
  add_common(quo, common);

  auto* ext = app.add_subcommand("extract", "infinitesimal data (g, k, quotient bialgebra) of a field");
  ext->add_option("--group", group, "catalog group")->required();
  ext->add_option("--field", field, "field file")->required();
  add_common(ext, common);

  auto* itg = app.add_subcommand("integrate", "the multiplicative field integrating (g, k, bialgebra)");
  itg->add_option("--algebra", algebra, "algebra file or catalog name")->required();
  itg->add_option("--ideal", ideal, "subspace file for k")->required();
  itg->add_option("--bialgebra", bialgebra, "bialgebra on g/k, file or catalog name")->required();
  itg->add_option("--group", group, "catalog group (defaults to the one with this algebra)");
  itg->add_option("-o,--output", output, "write the integrating field here");
  add_common(itg, common);

  auto* thm = app.add_subcommand("verify-thm31", "full structure pipeline for a multiplicative field");
  thm->add_option("--group", group, "catalog group")->required();
  thm->add_option("--field", field, "field file")->required();
  add_common(thm, common);

  auto* two = app.add_subcommand("solve-two-forms", "multiplicative two-forms at sampled points");
  two->add_option("--group", group, "catalog group")->required();
  add_common(two, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "dirac-lie: " << e.what() << "\n";
    return usage_error;
  }

  const auto* sub = app.get_subcommands().front();
  const std::string verb = sub->get_name();
  Failure failure;
  json report;
  report["schema_version"] = io::schema_version;
  report["command"] = verb;
  int code = ok;
  std::string summary;
  try {
    const auto opt = options_from(common);
    Outcome o;
    json inputs;
    if (verb == "check-jacobi") {
      o = check_jacobi(algebra);
    } else if (verb == "check-cocycle") {
      o = check_cocycle(bialgebra);
    } else if (verb == "check-ideal") {
      o = check_ideal(algebra, subspace);
    } else if (verb == "check-dirac") {
      o = check_dirac(subspace);
    } else if (verb == "check-multiplicative") {
      inputs = {{"group", group}, {"field", field}};
      o = with_arithmetic(group, [&](auto tag) { return check_multiplicative_verb<decltype(tag)>(group, field, opt); });
    } else if (verb == "check-distribution") {
      inputs = {{"group", group}, {"subspace", subspace}};
      o = with_arithmetic(group, [&](auto tag) { return check_distribution_verb<decltype(tag)>(group, subspace, opt); });
    } else if (verb == "pullback") {
      inputs = {{"hom", hom}, {"base", base}};
      if (catalog_registry<Rational>().has_chart(hom.substr(0, hom.find("->")))) {
        o = pullback_verb<Rational>(catalog_registry<Rational>().hom(hom), base, output, opt);
      } else {
        o = pullback_verb<double>(catalog_registry<double>().hom(hom), base, output, opt);
      }
    } else if (verb == "quotient") {
      inputs = {{"group", group}, {"field", field}};
      if (!hom.empty()) inputs["hom"] = hom;
      o = with_arithmetic(group, [&](auto tag) { return quotient_verb<decltype(tag)>(group, field, hom, opt); });
    } else if (verb == "extract") {
      inputs = {{"group", group}, {"field", field}};
      o = with_arithmetic(group, [&](auto tag) { return extract_verb<decltype(tag)>(group, field, opt); });
    } else if (verb == "integrate") {
      inputs = {{"algebra", algebra}, {"ideal", ideal}, {"bialgebra", bialgebra}};
      if (!group.empty()) inputs["group"] = group;
      o = integrate_verb(algebra, ideal, bialgebra, group, output, opt);
    } else if (verb == "verify-thm31") {
      inputs = {{"group", group}, {"field", field}};
      o = with_arithmetic(group,
                          [&](auto tag) { return verify_thm31_verb<decltype(tag)>(group, field, opt, failure); });
    } else if (verb == "solve-two-forms") {
      inputs = {{"group", group}};
      o = solve_two_forms_verb(group, opt);
    }
    if (!inputs.is_null()) {
      inputs["sampling"] = sampling_inputs(common, opt);
      report["inputs"] = inputs;
    }
    report["verdict"] = o.pass ? "pass" : "fail";
    for (auto& [k, v] : o.report.items()) report[k] = v;
    code = o.pass ? ok : check_failed;
    summary = o.pass ? "pass" : "fail" + (o.summary.empty() ? std::string() : ": " + o.summary);
  } catch (const StructureError& e) {
    report["verdict"] = "fail";
    if (failure.partial.is_object())
      for (auto& [k, v] : failure.partial.items()) report[k] = v;
    report["error"] = error_json(e);
    code = check_failed;
    summary = std::string("fail: ") + e.what();
  } catch (const Error& e) {
    err << "dirac-lie " << verb << ": error: " << e.what() << "\n";
    return usage_error;
  } catch (const json::exception& e) {
    err << "dirac-lie " << verb << ": error: malformed input: " << e.what() << "\n";
    return usage_error;
  }

  try {
    if (common.report.empty()) {
      out << io::dump(report);
    } else {
      io::write_file(common.report, report);
    }
  } catch (const Error& e) {
    err << "dirac-lie " << verb << ": error: " << e.what() << "\n";
    return usage_error;
  }
  err << "dirac-lie " << verb << ": " << summary << "\n";
  return code;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"dirac-lie"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace dirac::cli
