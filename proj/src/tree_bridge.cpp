#include "opshift/tree_bridge.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>

#include "opshift/errors.hpp"
#include "opshift/factory.hpp"

namespace opshift {

RootedTree::RootedTree(std::vector<std::optional<int>> parent) : parent_(std::move(parent)) {
  const int n = static_cast<int>(parent_.size());
  if (n == 0) throw DomainError("tree has no vertices");
  children_.assign(n, {});
  int roots = 0;
  for (int v = 0; v < n; ++v) {
    if (!parent_[v]) {
      root_ = v;
      ++roots;
      continue;
    }
    const int p = *parent_[v];
    if (p < 0 || p >= n || p == v) throw DomainError("vertex " + std::to_string(v) + " has invalid parent");
    children_[p].push_back(v);
  }
  if (roots != 1) throw DomainError("tree must have exactly one root, found " + std::to_string(roots));

  depth_.assign(n, -1);
  bfs_index_.assign(n, -1);
  std::deque<int> queue{root_};
  depth_[root_] = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    bfs_index_[v] = static_cast<int>(bfs_.size());
    bfs_.push_back(v);
    for (int c : children_[v]) {
      depth_[c] = depth_[v] + 1;
      queue.push_back(c);
    }
  }
  if (static_cast<int>(bfs_.size()) != n) throw DomainError("tree contains a cycle or an unreachable vertex");
}

RootedTree RootedTree::chain(int length) {
  std::vector<std::optional<int>> p{std::nullopt};
  for (int v = 1; v <= length; ++v) p.push_back(v - 1);
  return RootedTree(std::move(p));
}

RootedTree RootedTree::binary(int depth) {
  std::vector<std::optional<int>> p{std::nullopt};
  const int n = (1 << (depth + 1)) - 1;
  for (int v = 1; v < n; ++v) p.push_back((v - 1) / 2);
  return RootedTree(std::move(p));
}

int RootedTree::height() const { return *std::max_element(depth_.begin(), depth_.end()); }

TreeProduct::TreeProduct(std::vector<RootedTree> trees) : trees_(std::move(trees)) {
  if (trees_.empty()) throw DomainError("a tree product needs at least one tree");
}

MultiIndex TreeProduct::depth(const ProductVertex& v) const {
  std::vector<int> c(dim());
  for (std::size_t j = 0; j < dim(); ++j) c[j] = trees_[j].depth(v[j]);
  return MultiIndex(std::move(c));
}

std::vector<ProductVertex> TreeProduct::children(const ProductVertex& v, std::size_t j) const {
  std::vector<ProductVertex> out;
  for (int c : trees_[j].children(v[j])) {
    ProductVertex w = v;
    w[j] = c;
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<ProductVertex> TreeProduct::stratum(const MultiIndex& alpha) const {
  // Per axis, the vertices at the requested depth in breadth-first order.
  std::vector<std::vector<int>> levels(dim());
  for (std::size_t j = 0; j < dim(); ++j) {
    for (int v : trees_[j].bfs_order()) {
      if (trees_[j].depth(v) == alpha[j]) levels[j].push_back(v);
    }
    if (levels[j].empty()) return {};
  }
  std::vector<ProductVertex> out;
  std::vector<std::size_t> pos(dim(), 0);
  while (true) {
    ProductVertex v(dim());
    for (std::size_t j = 0; j < dim(); ++j) v[j] = levels[j][pos[j]];
    out.push_back(std::move(v));
    std::size_t k = dim();
    while (k > 0) {
      --k;
      if (++pos[k] < levels[k].size()) break;
      pos[k] = 0;
      if (k == 0) return out;
    }
  }
}

std::vector<ProductVertex> TreeProduct::vertices() const {
  std::vector<ProductVertex> out;
  ProductVertex v(dim(), 0);
  while (true) {
    out.push_back(v);
    std::size_t k = dim();
    while (k > 0) {
      --k;
      if (++v[k] < static_cast<int>(trees_[k].size())) break;
      v[k] = 0;
      if (k == 0) return out;
    }
  }
}

cd TreeWeights::at(std::size_t j, const ProductVertex& v) const {
  auto it = values.find({j, v});
  if (it == values.end()) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    throw MissingWeightError("missing tree weight at (j=" + std::to_string(j + 1) + ", v=" + s + "))");
  }
  return it->second;
}

TreeEmbedding embed(const TreeProduct& product, const TreeWeights& weights, int cap) {
  const TruncationBox box(product.dim(), cap);
  std::vector<std::vector<ProductVertex>> strata;
  std::vector<std::map<ProductVertex, Eigen::Index>> position;
  FiberMap fibers(1);
  for (const auto& alpha : box) {
    auto s = product.stratum(alpha);
    if (s.empty()) {
      throw BoxError("stratum V_" + alpha.to_string() + " is empty; the trees are too shallow for cap " +
                     std::to_string(cap));
    }
    if (s.size() != 1) fibers.overrides.emplace(alpha, static_cast<int>(s.size()));
    std::map<ProductVertex, Eigen::Index> pos;
    for (std::size_t i = 0; i < s.size(); ++i) pos.emplace(s[i], static_cast<Eigen::Index>(i));
    position.push_back(std::move(pos));
    strata.push_back(std::move(s));
  }

  Family fam(box, fibers, [&](std::size_t j, const MultiIndex& alpha) {
    const std::size_t r = box.rank(alpha);
    const std::size_t t = box.rank(add_unit(alpha, j));
    MatrixXcd a = MatrixXcd::Zero(static_cast<Eigen::Index>(strata[t].size()),
                                  static_cast<Eigen::Index>(strata[r].size()));
    for (std::size_t col = 0; col < strata[r].size(); ++col) {
      for (const auto& c : product.children(strata[r][col], j)) {
        a(position[t].at(c), static_cast<Eigen::Index>(col)) = weights.at(j, c);
      }
    }
    return a;
  });

  // U sends e_v to the basis vector of v inside its block.
  const auto verts = product.vertices();
  std::vector<ProductVertex> kept;
  for (const auto& v : verts) {
    if (product.depth(v).order() <= cap) kept.push_back(v);
  }
  const Eigen::Index dim = fam.layout().total();
  MatrixXcd u = MatrixXcd::Zero(dim, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto r = box.rank(product.depth(kept[k]));
    u(fam.layout().offset(r) + position[r].at(kept[k]), static_cast<Eigen::Index>(k)) = 1.0;
  }
  double residual = 0.0;
  for (std::size_t j = 0; j < product.dim(); ++j) {
    const MatrixXcd s = tree_shift_matrix(product, weights, j, cap);
    const MatrixXcd t = assemble_matrix(fam, j);
    residual = std::max(residual, (u * s - t * u).cwiseAbs().maxCoeff());
  }
  return {std::move(fam), std::move(strata), residual};
}

MatrixXcd tree_shift_matrix(const TreeProduct& product, const TreeWeights& weights, std::size_t j,
                            int cap) {
  std::vector<ProductVertex> kept;
  for (const auto& v : product.vertices()) {
    if (product.depth(v).order() <= cap) kept.push_back(v);
  }
  std::map<ProductVertex, Eigen::Index> index;
  for (std::size_t k = 0; k < kept.size(); ++k) index.emplace(kept[k], static_cast<Eigen::Index>(k));
  const auto n = static_cast<Eigen::Index>(kept.size());
  MatrixXcd s = MatrixXcd::Zero(n, n);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    for (const auto& c : product.children(kept[k], j)) {
      auto it = index.find(c);
      if (it != index.end()) s(it->second, static_cast<Eigen::Index>(k)) = weights.at(j, c);
    }
  }
  return s;
}

namespace {

cd random_nonzero(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  std::uniform_real_distribution<double> arg(-3.14159, 3.14159);
  return std::polar(mag(rng), arg(rng));
}

}  // namespace

TreeWeights separable_tree_weights(const TreeProduct& product, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<cd>> per_axis(product.dim());
  for (std::size_t j = 0; j < product.dim(); ++j) {
    for (std::size_t v = 0; v < product.tree(j).size(); ++v) per_axis[j].push_back(random_nonzero(rng));
  }
  TreeWeights w;
  for (const auto& v : product.vertices()) {
    for (std::size_t j = 0; j < product.dim(); ++j) {
      if (product.tree(j).parent(v[j])) w.set(j, v, per_axis[j][v[j]]);
    }
  }
  return w;
}

TreeWeights commuting_tree_weights(const TreeProduct& product, std::uint64_t seed) {
  if (product.dim() != 2) throw DomainError("commuting_tree_weights needs exactly two trees");
  std::mt19937_64 rng(seed);
  const auto& t1 = product.tree(0);
  const auto& t2 = product.tree(1);
  TreeWeights w;
  // lambda^{(1)} is free; lambda^{(2)} is free on the first-root fibre and then forced.
  for (int a : t1.bfs_order()) {
    for (int b : t2.bfs_order()) {
      if (t1.parent(a)) w.set(0, {a, b}, random_nonzero(rng));
    }
  }
  for (int b : t2.bfs_order()) {
    if (t2.parent(b)) w.set(1, {t1.root(), b}, random_nonzero(rng));
  }
  for (int a : t1.bfs_order()) {
    if (!t1.parent(a)) continue;
    for (int b : t2.bfs_order()) {
      if (!t2.parent(b)) continue;
      const ProductVertex u{a, b};
      const cd value = w.at(0, u) * w.at(1, {*t1.parent(a), b}) / w.at(0, {a, *t2.parent(b)});
      w.set(1, u, value);
    }
  }
  return w;
}

DecomposeResult decompose_unilateral(const Family& fam, const std::vector<MatrixXcd>& bases,
                                     const std::vector<std::vector<std::vector<int>>>& partitions,
                                     double tol, double coeff_tol) {
  if (fam.dim() != 1) throw DomainError("decomposition is defined for one variable");
  const int cap = fam.cap();
  if (static_cast<int>(bases.size()) != cap + 1) {
    throw ShapeError("expected " + std::to_string(cap + 1) + " bases, got " + std::to_string(bases.size()));
  }
  if (static_cast<int>(partitions.size()) != cap) {
    throw ShapeError("expected " + std::to_string(cap) + " partition levels, got " +
                     std::to_string(partitions.size()));
  }
  for (int n = 0; n <= cap; ++n) {
    const MatrixXcd& b = bases[n];
    const Eigen::Index dim = fam.fiber_dim(MultiIndex{n});
    if (b.rows() != dim || b.cols() != dim) {
      throw ShapeError("basis at level " + std::to_string(n) + " must be " + std::to_string(dim) + "x" +
                       std::to_string(dim));
    }
    if (linalg::op_norm(b.adjoint() * b - MatrixXcd::Identity(dim, dim)) > tol) {
      return NotApplicable{"basis at level " + std::to_string(n) + " is not orthonormal", MultiIndex{n},
                           std::nullopt};
    }
  }

  for (int n = 0; n < cap; ++n) {
    const Eigen::Index here = bases[n].cols(), next = bases[n + 1].cols();
    if (static_cast<Eigen::Index>(partitions[n].size()) != here) {
      throw ShapeError("partition at level " + std::to_string(n) + " needs one child set per basis vector");
    }
    std::vector<int> owner(static_cast<std::size_t>(next), -1);
    for (Eigen::Index x = 0; x < here; ++x) {
      for (int y : partitions[n][x]) {
        if (y < 0 || y >= next) throw ShapeError("child index out of range at level " + std::to_string(n));
        if (owner[y] != -1) {
          return NotApplicable{"child sets overlap at level " + std::to_string(n + 1) + " index " +
                                   std::to_string(y),
                               MultiIndex{n + 1}, std::nullopt};
        }
        owner[y] = static_cast<int>(x);
      }
    }
    for (Eigen::Index y = 0; y < next; ++y) {
      if (owner[y] == -1) {
        return NotApplicable{"basis vector " + std::to_string(y) + " at level " + std::to_string(n + 1) +
                                 " has no parent",
                             MultiIndex{n + 1}, std::nullopt};
      }
    }
  }

  // Check the expansion of A_n x over its child set and collect the weights.
  std::vector<std::vector<cd>> coeff(static_cast<std::size_t>(cap + 1));
  for (int n = 0; n < cap; ++n) {
    const MatrixXcd& a = fam.weight(0, MultiIndex{n});
    coeff[n + 1].assign(static_cast<std::size_t>(bases[n + 1].cols()), cd(0.0));
    for (Eigen::Index x = 0; x < bases[n].cols(); ++x) {
      const VectorXcd ax = a * bases[n].col(x);
      VectorXcd rebuilt = VectorXcd::Zero(ax.size());
      for (int y : partitions[n][x]) {
        const cd c = bases[n + 1].col(y).dot(ax);
        if (std::abs(c) < coeff_tol) {
          return NotApplicable{"vanishing coefficient between basis vector " + std::to_string(x) +
                                   " at level " + std::to_string(n) + " and child " + std::to_string(y),
                               MultiIndex{n}, MultiIndex{n + 1}};
        }
        coeff[n + 1][y] = c;
        rebuilt += c * bases[n + 1].col(y);
      }
      if ((ax - rebuilt).norm() > tol * std::max(1.0, ax.norm())) {
        return NotApplicable{"A_" + std::to_string(n) + " x_" + std::to_string(x) +
                                 " leaves the span of its child set",
                             MultiIndex{n}, std::nullopt};
      }
    }
  }

  Forest forest;
  for (Eigen::Index root = 0; root < bases[0].cols(); ++root) {
    std::vector<std::optional<int>> parent{std::nullopt};
    ForestTree ft;
    ft.weights.push_back(0.0);
    ft.place.push_back({0, static_cast<int>(root)});
    // Breadth first so that vertex ids follow levels.
    for (std::size_t k = 0; k < ft.place.size(); ++k) {
      const auto [n, x] = ft.place[k];
      if (n >= cap) continue;
      if (partitions[n][x].empty()) forest.leaves.push_back({n, x});
      for (int y : partitions[n][x]) {
        parent.push_back(static_cast<int>(k));
        ft.weights.push_back(coeff[n + 1][y]);
        ft.place.push_back({n + 1, y});
      }
    }
    ft.tree = RootedTree(std::move(parent));
    forest.trees.push_back(std::move(ft));
  }

  double residual = 0.0;
  for (const auto& ft : forest.trees) {
    for (std::size_t k = 0; k < ft.place.size(); ++k) {
      const auto [n, x] = ft.place[k];
      if (n >= cap) continue;
      const VectorXcd tu = fam.weight(0, MultiIndex{n}) * bases[n].col(x);
      VectorXcd us = VectorXcd::Zero(tu.size());
      for (int c : ft.tree.children(static_cast<int>(k))) us += ft.weights[c] * bases[n + 1].col(ft.place[c].second);
      residual = std::max(residual, (tu - us).norm());
    }
  }
  std::sort(forest.leaves.begin(), forest.leaves.end());
  forest.residual = residual;
  return forest;
}

Reassembly reassemble(const Forest& forest, const std::vector<MatrixXcd>& bases) {
  const int cap = static_cast<int>(bases.size()) - 1;
  // Level n of the direct sum lists the tree vertices at depth n, tree by tree.
  std::vector<std::vector<std::pair<std::size_t, int>>> level(static_cast<std::size_t>(cap + 1));
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    const auto& ft = forest.trees[t];
    for (int v : ft.tree.bfs_order()) {
      if (ft.place[v].first <= cap) level[ft.place[v].first].push_back({t, v});
    }
  }
  std::vector<std::map<std::pair<std::size_t, int>, Eigen::Index>> index(level.size());
  FiberMap fibers(1);
  for (int n = 0; n <= cap; ++n) {
    for (std::size_t i = 0; i < level[n].size(); ++i) index[n].emplace(level[n][i], static_cast<Eigen::Index>(i));
    if (level[n].empty()) throw BoxError("forest has no vertex at level " + std::to_string(n));
    if (level[n].size() != 1) fibers.overrides.emplace(MultiIndex{n}, static_cast<int>(level[n].size()));
  }
  Family fam(TruncationBox(1, cap), fibers, [&](std::size_t, const MultiIndex& alpha) {
    const int n = alpha[0];
    MatrixXcd a = MatrixXcd::Zero(static_cast<Eigen::Index>(level[n + 1].size()),
                                  static_cast<Eigen::Index>(level[n].size()));
    for (std::size_t col = 0; col < level[n].size(); ++col) {
      const auto [t, v] = level[n][col];
      const auto& ft = forest.trees[t];
      for (int c : ft.tree.children(v)) a(index[n + 1].at({t, c}), static_cast<Eigen::Index>(col)) = ft.weights[c];
    }
    return a;
  });
  std::vector<MatrixXcd> maps;
  for (int n = 0; n <= cap; ++n) {
    MatrixXcd w(bases[n].rows(), static_cast<Eigen::Index>(level[n].size()));
    for (std::size_t i = 0; i < level[n].size(); ++i) {
      const auto [t, v] = level[n][i];
      w.col(static_cast<Eigen::Index>(i)) = bases[n].col(forest.trees[t].place[v].second);
    }
    maps.push_back(std::move(w));
  }
  return {std::move(fam), std::move(maps)};
}

}  // namespace opshift
