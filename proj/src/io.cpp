#include "dirac/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dirac::io {

using linalg::Subspace;
using linalg::Vector;

json load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

std::string dump(const json& value) { return value.dump(2) + "\n"; }

void write_file(const std::filesystem::path& path, const json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << dump(value);
}

namespace {

const json& require(const json& obj, const char* key, const char* what) {
  if (!obj.is_object() || !obj.contains(key))
    throw InputError(std::string(what) + ": missing field '" + key + "'");
  return obj.at(key);
}

std::size_t count_from_json(const json& v, const char* what) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw InputError(std::string(what) + " must be a count");
  return v.get<std::size_t>();
}

std::size_t index_from_string(const std::string& s, std::size_t dim) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw InputError("bad index '" + s + "'");
  }
  if (pos != s.size() || s.empty() || s[0] == '-' || s[0] == '+') throw InputError("bad index '" + s + "'");
  if (v >= dim) throw InputError("index " + s + " out of range for dimension " + std::to_string(dim));
  return static_cast<std::size_t>(v);
}

}  // namespace

Rational rational_from_json(const json& value) {
  if (value.is_string()) return parse_rational(value.get<std::string>());
  if (value.is_number_integer()) return Rational(value.dump());
  throw InputError("expected a rational as \"p/q\" or an integer, got " + value.dump());
}

double real_from_json(const json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) return parse_rational(value.get<std::string>()).get_d();
  throw InputError("expected a number, got " + value.dump());
}

template <>
Rational scalar_from_json<Rational>(const json& value) {
  return rational_from_json(value);
}
template <>
double scalar_from_json<double>(const json& value) {
  return real_from_json(value);
}
template <>
json scalar_to_json<Rational>(const Rational& value) {
  return format_rational(value);
}
template <>
json scalar_to_json<double>(const double& value) {
  return value;
}

std::pair<std::size_t, std::size_t> index_pair(const std::string& key, std::size_t dim) {
  const auto comma = key.find(',');
  if (comma == std::string::npos) throw InputError("expected an index pair \"i,j\", got '" + key + "'");
  auto trim = [](std::string s) {
    s.erase(0, s.find_first_not_of(' '));
    s.erase(s.find_last_not_of(' ') + 1);
    return s;
  };
  const auto i = index_from_string(trim(key.substr(0, comma)), dim);
  const auto j = index_from_string(trim(key.substr(comma + 1)), dim);
  if (i >= j) throw InputError("index pair '" + key + "' must satisfy i < j");
  return {i, j};
}

LieAlgebra algebra_from_json(const json& value) {
  if (value.is_string()) return catalog::by_name(value.get<std::string>());
  const auto dim = count_from_json(require(value, "dim", "algebra"), "algebra dim");
  const std::string name = value.contains("name") ? value.at("name").get<std::string>() : "custom";
  LieAlgebra g(name, dim);
  if (value.contains("brackets")) {
    const auto& brackets = value.at("brackets");
    if (!brackets.is_object()) throw InputError("algebra: 'brackets' must be an object");
    for (const auto& [key, entry] : brackets.items()) {
      const auto [i, j] = index_pair(key, dim);
      if (!entry.is_object()) throw InputError("algebra: bracket " + key + " must be an object");
      RationalVector v(dim, Rational(0));
      for (const auto& [k, c] : entry.items()) v[index_from_string(k, dim)] = rational_from_json(c);
      g.set_bracket(i, j, v);
    }
  }
  return g;
}

json algebra_to_json(const LieAlgebra& g) {
  json out;
  out["name"] = g.name();
  out["dim"] = g.dim();
  json brackets = json::object();
  for (auto [i, j] : wedge_pairs(g.dim())) {
    json entry = json::object();
    for (std::size_t k = 0; k < g.dim(); ++k)
      if (sgn(g.constant(i, j, k)) != 0) entry[std::to_string(k)] = format_rational(g.constant(i, j, k));
    if (!entry.empty()) brackets[std::to_string(i) + "," + std::to_string(j)] = entry;
  }
  out["brackets"] = brackets;
  return out;
}

template <class T>
Subspace<T> subspace_from_json(const json& value, std::optional<std::size_t> ambient) {
  const json& gens = value.is_array() ? value : require(value, "generators", "subspace");
  if (!gens.is_array()) throw InputError("subspace: 'generators' must be an array");
  std::optional<std::size_t> m = ambient;
  if (value.is_object() && value.contains("ambient_dim")) {
    const auto declared = count_from_json(value.at("ambient_dim"), "ambient_dim");
    if (m && *m != declared)
      throw InputError("subspace: ambient_dim " + std::to_string(declared) + " but " + std::to_string(*m) +
                       " is required here");
    m = declared;
  }
  std::vector<Vector<T>> rows;
  for (const auto& g : gens) {
    if (!g.is_array()) throw InputError("subspace: each generator must be an array");
    Vector<T> v;
    for (const auto& x : g) v.push_back(scalar_from_json<T>(x));
    if (!m) m = v.size();
    if (v.size() != *m) throw InputError("subspace: generator length differs from the ambient dimension");
    rows.push_back(std::move(v));
  }
  if (!m) throw InputError("subspace: ambient_dim is required when there are no generators");
  return Subspace<T>::span(*m, rows);
}

template <class T>
json vector_to_json(const Vector<T>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(scalar_to_json<T>(x));
  return out;
}

template <class T>
json subspace_to_json(const Subspace<T>& s) {
  json out;
  out["ambient_dim"] = s.ambient_dim();
  out["dim"] = s.dim();
  json gens = json::array();
  for (std::size_t i = 0; i < s.dim(); ++i) gens.push_back(vector_to_json<T>(s.basis_vector(i)));
  out["generators"] = gens;
  return out;
}

DiracSubspace<Rational> dirac_subspace_from_json(const json& value) {
  const auto n = count_from_json(require(value, "n", "dirac subspace"), "n");
  const auto space = subspace_from_json<Rational>(json{{"generators", require(value, "generators", "dirac subspace")}},
                                                  2 * n);
  return DiracSubspace<Rational>(n, space);
}

json dirac_subspace_to_json(const DiracSubspace<Rational>& l) {
  json out;
  out["n"] = l.n();
  out["generators"] = subspace_to_json(l.space())["generators"];
  return out;
}

Cobracket cobracket_from_json(const json& value) {
  if (value.is_string()) return catalog::bialgebra_by_name(value.get<std::string>());
  auto g = algebra_from_json(require(value, "algebra", "bialgebra"));
  Cobracket cb(g);
  if (value.contains("delta")) {
    const auto& delta = value.at("delta");
    if (!delta.is_object()) throw InputError("bialgebra: 'delta' must be an object");
    for (const auto& [key, entry] : delta.items()) {
      const auto i = index_from_string(key, g.dim());
      if (!entry.is_object()) throw InputError("bialgebra: delta entry " + key + " must be an object");
      for (const auto& [pair, c] : entry.items()) {
        const auto [j, k] = index_pair(pair, g.dim());
        cb.set(i, j, k, rational_from_json(c));
      }
    }
  }
  return cb;
}

json cobracket_to_json(const Cobracket& cb) {
  json out;
  out["algebra"] = algebra_to_json(cb.algebra());
  json delta = json::object();
  for (std::size_t i = 0; i < cb.dim(); ++i) {
    json entry = json::object();
    for (auto [j, k] : wedge_pairs(cb.dim()))
      if (sgn(cb.get(i, j, k)) != 0) entry[std::to_string(j) + "," + std::to_string(k)] = format_rational(cb.get(i, j, k));
    if (!entry.empty()) delta[std::to_string(i)] = entry;
  }
  out["delta"] = delta;
  return out;
}

RationalVector wedge_from_json(const json& value, std::size_t n) {
  if (!value.is_object()) throw InputError("expected an object of \"j,k\" coefficients");
  RationalVector w(wedge_dim(n), Rational(0));
  for (const auto& [key, c] : value.items()) {
    const auto [j, k] = index_pair(key, n);
    w[wedge_index(n, j, k)] = rational_from_json(c);
  }
  return w;
}

json wedge_to_json(const RationalVector& w, std::size_t n) {
  json out = json::object();
  std::size_t idx = 0;
  for (auto [j, k] : wedge_pairs(n)) {
    if (sgn(w[idx]) != 0) out[std::to_string(j) + "," + std::to_string(k)] = format_rational(w[idx]);
    ++idx;
  }
  return out;
}

template <class T>
DiracField<T> field_from_json(const json& value, const std::filesystem::path& base_dir, const std::string& group) {
  if (!value.is_object()) throw InputError("field: expected an object");
  std::string name = group;
  if (value.contains("group")) {
    const auto declared = value.at("group").get<std::string>();
    if (!group.empty() && declared != group)
      throw InputError("field is on group '" + declared + "' but '" + group + "' was requested");
    name = declared;
  }
  if (name.empty()) throw InputError("field: no group given");
  const auto& reg = catalog_registry<T>();
  const auto chart = reg.chart(name);
  const std::size_t n = chart->algebra.dim();
  const auto kind = field_kind_from_string(require(value, "kind", "field").get<std::string>());
  switch (kind) {
    case FieldKind::foliation: {
      auto f_e = subspace_from_json<T>(value.contains("generators") ? json{{"generators", value.at("generators")}}
                                                                    : json{{"generators", json::array()}},
                                       n);
      std::optional<bool> closed;
      if (value.contains("closed_leaf")) {
        if (!value.at("closed_leaf").is_boolean()) throw InputError("field: 'closed_leaf' must be a boolean");
        closed = value.at("closed_leaf").get<bool>();
      }
      return make_foliation<T>(chart, std::move(f_e), closed);
    }
    case FieldKind::poisson_linear: {
      auto dual = algebra_from_json(require(value, "dual", "poisson_linear field"));
      return make_linear_poisson<T>(chart, std::move(dual));
    }
    case FieldKind::poisson_coboundary:
      return make_coboundary_poisson<T>(chart, wedge_from_json(require(value, "r", "poisson_coboundary field"), n));
    case FieldKind::two_form_graph:
      return make_two_form_graph<T>(chart, wedge_from_json(require(value, "w", "two_form_graph field"), n));
    case FieldKind::pullback: {
      const auto hom = reg.hom(require(value, "hom", "pullback field").get<std::string>());
      if (hom->source != chart) throw InputError("pullback: " + hom->name + " does not start at " + name);
      const auto& base_value = require(value, "base", "pullback field");
      DiracField<T> base;
      if (base_value.is_string()) {
        const auto path = base_dir / base_value.get<std::string>();
        base = field_from_json<T>(load_file(path), path.parent_path(), hom->target->name);
      } else {
        base = field_from_json<T>(base_value, base_dir, hom->target->name);
      }
      return make_pullback(hom, base);
    }
    case FieldKind::quotient:
      break;
  }
  throw InputError("field: kind cannot be loaded from a file");
}

template <class T>
json field_to_json(const DiracField<T>& f) {
  json out;
  out["group"] = f.chart->name;
  out["kind"] = to_string(f.kind);
  const std::size_t n = f.chart->algebra.dim();
  switch (f.kind) {
    case FieldKind::foliation:
      out["generators"] = subspace_to_json(f.distribution)["generators"];
      if (f.closed_leaf) out["closed_leaf"] = *f.closed_leaf;
      break;
    case FieldKind::poisson_linear:
      out["dual"] = algebra_to_json(f.dual);
      break;
    case FieldKind::poisson_coboundary:
      out["r"] = wedge_to_json(f.r, n);
      break;
    case FieldKind::two_form_graph:
      out["w"] = wedge_to_json(f.w, n);
      break;
    case FieldKind::pullback:
      out["hom"] = f.hom->name;
      out["base"] = field_to_json(*f.base);
      break;
    case FieldKind::quotient:
      out["hom"] = f.hom->name;
      out["source"] = field_to_json(*f.base);
      break;
  }
  return out;
}

namespace {

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json sampling_to_json(const SamplingSummary& s) {
  json out;
  out["seed"] = s.seed;
  out["random_samples"] = s.random_samples;
  out["grid_points"] = s.grid_points;
  out["degree_bound"] = s.degree_bound ? json(*s.degree_bound) : json(nullptr);
  out["conclusive_grid"] = s.conclusive;
  out["arithmetic"] = s.exact ? "exact" : "float";
  out["tolerance"] = s.tolerance;
  out["max_residual"] = finite_or_null(s.max_residual);
  return out;
}

json witness_to_json(const std::optional<PointWitness>& w) {
  if (!w) return nullptr;
  json out;
  if (!w->g.empty() || !w->h.empty()) out["g"] = w->g;
  if (!w->h.empty()) out["h"] = w->h;
  out["detail"] = w->detail;
  out["residual"] = finite_or_null(w->residual);
  return out;
}

json report_to_json(const MultiplicativityReport& r) {
  json out;
  out["verdict"] = r.pass ? "pass" : "fail";
  out["sampling"] = sampling_to_json(r.sampling);
  out["witness"] = witness_to_json(r.witness);
  return out;
}

json report_to_json(const DistributionReport& r) {
  json out;
  out["verdict"] = r.pass ? "pass" : "fail";
  out["bi_invariant"] = r.bi_invariant;
  out["ad_invariant"] = r.ad_invariant;
  out["criteria_agree"] = r.agree;
  out["sampling"] = sampling_to_json(r.sampling);
  out["witness"] = witness_to_json(r.witness);
  return out;
}

template <class T>
json report_to_json(const CharacteristicReport<T>& r) {
  json out;
  out["verdict"] = r.pass ? "pass" : "fail";
  out["k_e"] = subspace_to_json(r.k_e);
  out["rank"] = r.rank;
  out["constant_rank"] = r.constant_rank;
  out["left_coset"] = r.left_coset;
  out["right_coset"] = r.right_coset;
  out["ideal"] = r.ideal;
  out["sampling"] = sampling_to_json(r.sampling);
  out["witness"] = witness_to_json(r.witness);
  return out;
}

json report_to_json(const QuotientReport& r) {
  json out;
  out["verdict"] = r.pass ? "pass" : "fail";
  out["hom"] = r.hom;
  out["recognized"] = r.recognized;
  out["graph_of_bivector"] = r.graph_of_bivector;
  out["well_defined"] = r.well_defined;
  out["multiplicative"] = r.multiplicative;
  out["round_trip"] = r.round_trip;
  out["points"] = r.points;
  out["multiplicativity"] = report_to_json(r.multiplicativity);
  out["witness"] = witness_to_json(r.witness);
  return out;
}

json report_to_json(const JacobiReport& r) {
  json out;
  out["verdict"] = r.pass ? "pass" : "fail";
  if (r.witness) {
    out["witness"] = {{"triple", json::array({(*r.witness)[0], (*r.witness)[1], (*r.witness)[2]})},
                      {"jacobiator", vector_to_json<Rational>(r.residual)}};
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

json report_to_json(const IdealReport& r) {
  json out;
  out["verdict"] = r.pass ? "pass" : "fail";
  if (!r.pass) {
    out["witness"] = {{"algebra_index", r.algebra_index},
                      {"element", vector_to_json<Rational>(r.element)},
                      {"bracket", vector_to_json<Rational>(r.bracket_value)}};
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

json report_to_json(const CocycleReport& r) {
  json out;
  out["verdict"] = r.pass ? "pass" : "fail";
  if (r.witness) {
    out["witness"] = {{"pair", json::array({r.witness->first, r.witness->second})},
                      {"residual", vector_to_json<Rational>(r.residual)}};
  } else {
    out["witness"] = nullptr;
  }
  return out;
}

json report_to_json(const BialgebraReport& r) {
  json out;
  out["verdict"] = r.pass ? "pass" : "fail";
  out["jacobi"] = report_to_json(r.algebra_jacobi);
  out["dual_jacobi"] = report_to_json(r.dual_jacobi);
  out["cocycle"] = report_to_json(r.cocycle);
  return out;
}

json report_to_json(const InfinitesimalDataReport& r) {
  json out;
  out["verdict"] = r.pass ? "pass" : "fail";
  out["failure"] = r.failure.empty() ? json(nullptr) : json(r.failure);
  out["ideal"] = report_to_json(r.ideal);
  out["quotient_matches"] = r.quotient_matches;
  out["bialgebra"] = report_to_json(r.bialgebra);
  return out;
}

json report_to_json(const InfinitesimalData& d) {
  json out;
  out["verdict"] = d.check.pass ? "pass" : "fail";
  out["algebra"] = algebra_to_json(d.algebra);
  out["k_e"] = subspace_to_json(d.k);
  out["quotient_bialgebra"] = cobracket_to_json(d.cobracket);
  out["method"] = d.method;
  out["linearization_residual"] = d.linearization_residual;
  out["check"] = report_to_json(d.check);
  return out;
}

json report_to_json(const TwoFormSolution& s) {
  json out;
  out["verdict"] = s.solution_dim == 0 ? "pass" : "fail";
  out["pairs"] = s.pairs;
  out["points"] = s.points;
  out["unknowns"] = s.unknowns;
  out["equations"] = s.equations;
  out["solution_dim"] = s.solution_dim;
  json basis = json::array();
  for (std::size_t i = 0; i < s.solutions.dim(); ++i) basis.push_back(vector_to_json<Rational>(s.solutions.basis_vector(i)));
  out["solution_basis"] = basis;
  out["sampling"] = sampling_to_json(s.sampling);
  return out;
}

#define DIRAC_INSTANTIATE_IO(T)                                                                            \
  template Subspace<T> subspace_from_json<T>(const json&, std::optional<std::size_t>);                     \
  template json subspace_to_json<T>(const Subspace<T>&);                                                   \
  template json vector_to_json<T>(const Vector<T>&);                                                       \
  template DiracField<T> field_from_json<T>(const json&, const std::filesystem::path&, const std::string&); \
  template json field_to_json<T>(const DiracField<T>&);                                                    \
  template json report_to_json<T>(const CharacteristicReport<T>&);

DIRAC_INSTANTIATE_IO(Rational)
DIRAC_INSTANTIATE_IO(double)

#undef DIRAC_INSTANTIATE_IO

}  // namespace dirac::io
