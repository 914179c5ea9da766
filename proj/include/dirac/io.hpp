#pragma once

// JSON file formats and report serialization. Rationals are written as "p/q"
// or "p" strings; exact inputs also accept JSON integers, float inputs accept
// any JSON number.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "dirac/lie_bialgebra.hpp"
#include "dirac/multiplicative_dirac.hpp"

namespace dirac::io {

using json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

/// Throws InputError when the file is missing or is not valid JSON.
json load_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const json& value);
std::string dump(const json& value);  // two-space indent, trailing newline

Rational rational_from_json(const json& value);
double real_from_json(const json& value);
template <class T>
T scalar_from_json(const json& value);
template <class T>
json scalar_to_json(const T& value);

/// "i,j" -> (i, j), both below `dim`.
std::pair<std::size_t, std::size_t> index_pair(const std::string& key, std::size_t dim);

/// { "name", "dim", "brackets": { "i,j": { "k": "p/q" } } } or a catalog name.
LieAlgebra algebra_from_json(const json& value);
json algebra_to_json(const LieAlgebra& g);

/// { "ambient_dim": m, "generators": [[...], ...] }. When the file omits
/// ambient_dim, `ambient` (if given) or the generator length is used.
template <class T>
linalg::Subspace<T> subspace_from_json(const json& value, std::optional<std::size_t> ambient = {});
template <class T>
json subspace_to_json(const linalg::Subspace<T>& s);
template <class T>
json vector_to_json(const linalg::Vector<T>& v);

/// { "n": n, "generators": [[2n rationals], ...] }; validated as Dirac.
DiracSubspace<Rational> dirac_subspace_from_json(const json& value);
json dirac_subspace_to_json(const DiracSubspace<Rational>& l);

/// { "algebra": <algebra>, "delta": { "i": { "j,k": "p/q" } } } or a catalog name.
Cobracket cobracket_from_json(const json& value);
json cobracket_to_json(const Cobracket& cb);

/// { "j,k": "p/q" } coefficients of an element of Λ² in dimension n.
RationalVector wedge_from_json(const json& value, std::size_t n);
json wedge_to_json(const RationalVector& w, std::size_t n);

/// Field files name their group; `group` (from the command line) must agree
/// when both are present. Nested "base" fields may be inline objects or paths
/// relative to `base_dir`.
template <class T>
DiracField<T> field_from_json(const json& value, const std::filesystem::path& base_dir,
                              const std::string& group = {});
template <class T>
json field_to_json(const DiracField<T>& field);

json sampling_to_json(const SamplingSummary& s);
json witness_to_json(const std::optional<PointWitness>& w);
json report_to_json(const MultiplicativityReport& r);
json report_to_json(const DistributionReport& r);
template <class T>
json report_to_json(const CharacteristicReport<T>& r);
json report_to_json(const QuotientReport& r);
json report_to_json(const JacobiReport& r);
json report_to_json(const IdealReport& r);
json report_to_json(const CocycleReport& r);
json report_to_json(const BialgebraReport& r);
json report_to_json(const InfinitesimalDataReport& r);
json report_to_json(const InfinitesimalData& d);
json report_to_json(const TwoFormSolution& s);

}  // namespace dirac::io
