#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "opshift/json_io.hpp"
#include "opshift/tree_bridge.hpp"

namespace opshift::cli {

/// Tree-product document:
/// { "degree_cap" (optional), "trees": [{"parent": [null, 0, ...]}],
///   "weights": [{"j" (1-based), "v": [vertex per tree], "value": [re, im]}] }.
/// A single tree may also be given as a top-level "parent" array.
struct TreeDocument {
  TreeProduct product;
  TreeWeights weights;
  std::optional<int> degree_cap;
};
TreeDocument tree_document_from_json(const json& doc);

/// Forest output: trees with parent arrays, weights and basis_map, plus leaves and residual.
json forest_to_json(const Forest& forest);

/// Basis document for decompose-shift:
/// { "bases": [matrix per level, columns are basis vectors],
///   "partitions": [[child index lists per basis vector] per level] }.
struct BasisDocument {
  std::vector<MatrixXcd> bases;
  std::vector<std::vector<std::vector<int>>> partitions;
};
BasisDocument basis_document_from_json(const json& doc);

/// Runs one command line. Returns 0 on success, 1 on a failed verdict under
/// --strict and 2 on usage or input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace opshift::cli
