#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "opshift/structure.hpp"
#include "opshift/weight_family.hpp"

namespace opshift {

/// A finite rooted directed tree given by parent pointers (nullopt for the root).
class RootedTree {
 public:
  RootedTree() = default;
  explicit RootedTree(std::vector<std::optional<int>> parent);

  /// 0 - 1 - ... - length.
  static RootedTree chain(int length);
  /// Full binary tree of the given depth, vertices numbered breadth first.
  static RootedTree binary(int depth);

  std::size_t size() const { return parent_.size(); }
  int root() const { return root_; }
  std::optional<int> parent(int v) const { return parent_.at(v); }
  const std::vector<int>& children(int v) const { return children_.at(v); }
  int depth(int v) const { return depth_.at(v); }
  int height() const;
  /// Breadth-first order, children visited by increasing vertex id.
  const std::vector<int>& bfs_order() const { return bfs_; }
  int bfs_index(int v) const { return bfs_index_.at(v); }
  const std::vector<std::optional<int>>& parents() const { return parent_; }

 private:
  std::vector<std::optional<int>> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<int> depth_;
  std::vector<int> bfs_;
  std::vector<int> bfs_index_;
  int root_ = 0;
};

/// A vertex of a product of trees: one vertex id per factor.
using ProductVertex = std::vector<int>;

/// Directed Cartesian product of d rooted trees.
class TreeProduct {
 public:
  explicit TreeProduct(std::vector<RootedTree> trees);

  std::size_t dim() const { return trees_.size(); }
  const RootedTree& tree(std::size_t j) const { return trees_.at(j); }
  const std::vector<RootedTree>& trees() const { return trees_; }

  /// Componentwise depth d_v.
  MultiIndex depth(const ProductVertex& v) const;
  /// Children of v along axis j: v with coordinate j replaced by a child.
  std::vector<ProductVertex> children(const ProductVertex& v, std::size_t j) const;
  /// V_alpha, sorted lexicographically on per-tree breadth-first indices.
  std::vector<ProductVertex> stratum(const MultiIndex& alpha) const;
  /// Every vertex, in mixed-radix order of vertex ids.
  std::vector<ProductVertex> vertices() const;

 private:
  std::vector<RootedTree> trees_;
};

/// Edge weights lambda^{(j)}_v, keyed by the head v of the edge along axis j.
struct TreeWeights {
  std::map<std::pair<std::size_t, ProductVertex>, cd> values;

  cd at(std::size_t j, const ProductVertex& v) const;
  void set(std::size_t j, const ProductVertex& v, cd value) { values[{j, v}] = value; }
};

struct TreeEmbedding {
  Family family;
  /// V_alpha by rank in the box; position in the list is the basis index in H_alpha.
  std::vector<std::vector<ProductVertex>> strata;
  /// max_j ||U S_j - T_j U|| on the truncated vertex space.
  double intertwining_residual = 0.0;
};

/// Operator-valued multishift unitarily equivalent to the tree multishift S_lambda,
/// truncated to |d_v| <= cap. Throws BoxError when a stratum in the box is empty.
TreeEmbedding embed(const TreeProduct& product, const TreeWeights& weights, int cap);

/// Matrix of S_j on {v : |d_v| <= cap} in the order of TreeProduct::vertices().
MatrixXcd tree_shift_matrix(const TreeProduct& product, const TreeWeights& weights, std::size_t j,
                            int cap);

/// Nonzero random weights on every edge; separable in the coordinates, hence commuting.
TreeWeights separable_tree_weights(const TreeProduct& product, std::uint64_t seed);

/// Nonzero random commuting weights on a product of two trees that do not
/// factor over the coordinates.
TreeWeights commuting_tree_weights(const TreeProduct& product, std::uint64_t seed);

/// One tree of a decomposition: vertex k sits at `place[k]` = (level, basis index).
struct ForestTree {
  RootedTree tree;
  /// lambda for every vertex; the root carries 0.
  std::vector<cd> weights;
  std::vector<std::pair<int, int>> place;
};

struct Forest {
  std::vector<ForestTree> trees;
  /// Basis vectors with empty child sets, as (level, index), below the top level.
  std::vector<std::pair<int, int>> leaves;
  /// max over basis vectors of ||T U e_x - U S e_x||.
  double residual = 0.0;
};

using DecomposeResult = std::variant<Forest, NotApplicable>;

/// Splits a one-variable family into weighted shifts on rooted directed trees
/// using caller supplied orthonormal bases (columns of bases[n]) and child sets
/// partitions[n][x] of indices into bases[n+1].
DecomposeResult decompose_unilateral(const Family& fam, const std::vector<MatrixXcd>& bases,
                                     const std::vector<std::vector<std::vector<int>>>& partitions,
                                     double tol = 1e-10, double coeff_tol = 1e-12);

struct Reassembly {
  Family family;
  /// W_n maps the direct-sum coordinates at level n into H_n.
  std::vector<MatrixXcd> maps;
};

/// Direct sum of the tree shifts of a forest, level by level, together with the
/// maps back onto the bases the forest was built from.
Reassembly reassemble(const Forest& forest, const std::vector<MatrixXcd>& bases);

}  // namespace opshift
