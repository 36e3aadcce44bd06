#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "opshift/lattice.hpp"
#include "opshift/linalg.hpp"
#include "opshift/weight_family.hpp"

namespace opshift {

using json = nlohmann::json;

/// Deterministic JSON text: object keys sorted, floating-point values printed
/// with 17 significant digits, two-space indentation, trailing newline.
std::string dump_canonical(const json& value);

json to_json_value(const MultiIndex& alpha);
MultiIndex multi_index_from_json(const json& value, std::size_t d, const std::string& path);

/// Complex matrices are row-major arrays of [re, im] pairs.
json to_json_value(const MatrixXcd& m);
MatrixXcd matrix_from_json(const json& value, const std::string& path);

json complex_to_json(cd z);
cd complex_from_json(const json& value, const std::string& path);

/// Weight-family document:
/// { "d", "degree_cap", "fiber_dims": {"default", "overrides": [{"alpha", "dim"}]},
///   "weights": [{"j" (1-based), "alpha", "matrix"}] }.
json family_to_json_value(const Family& fam);
Family family_from_json_value(const json& doc);

std::string to_json(const Family& fam);
Family from_json(std::string_view text);

/// Read a whole file; throws SchemaError when it cannot be opened or parsed.
json read_json_file(const std::string& path);

}  // namespace opshift
