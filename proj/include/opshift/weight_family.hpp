#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "opshift/errors.hpp"
#include "opshift/lattice.hpp"
#include "opshift/linalg.hpp"

namespace opshift {

/// Fiber dimensions n_alpha = dim H_alpha: a default plus per-index overrides.
struct FiberMap {
  int default_dim = 1;
  std::map<MultiIndex, int> overrides;

  FiberMap() = default;
  explicit FiberMap(int n) : default_dim(n) {}

  int dim(const MultiIndex& alpha) const {
    auto it = overrides.find(alpha);
    return it == overrides.end() ? default_dim : it->second;
  }

  friend bool operator==(const FiberMap&, const FiberMap&) = default;
};

/// Block layout of the truncated space: fiber sizes and storage offsets in
/// graded lexicographic order.
class FiberLayout {
 public:
  FiberLayout(TruncationBox box, const FiberMap& fibers) : box_(std::move(box)) {
    dims_.reserve(box_.size());
    offsets_.reserve(box_.size());
    Eigen::Index off = 0;
    for (const auto& alpha : box_) {
      const int n = fibers.dim(alpha);
      if (n < 1) throw ShapeError("fiber dimension at " + alpha.to_string() + " must be >= 1");
      dims_.push_back(n);
      offsets_.push_back(off);
      off += n;
    }
    total_ = off;
    for (const auto& [alpha, n] : fibers.overrides) {
      if (!box_.contains(alpha)) {
        throw BoxError("fiber override at " + alpha.to_string() + " outside the box");
      }
    }
  }

  const TruncationBox& box() const { return box_; }
  Eigen::Index dim(std::size_t rank) const { return dims_[rank]; }
  Eigen::Index dim(const MultiIndex& alpha) const { return dims_[box_.rank(alpha)]; }
  Eigen::Index offset(std::size_t rank) const { return offsets_[rank]; }
  Eigen::Index offset(const MultiIndex& alpha) const { return offsets_[box_.rank(alpha)]; }
  /// D = sum of all fiber dimensions.
  Eigen::Index total() const { return total_; }

  std::optional<Eigen::Index> constant_dim() const {
    for (auto n : dims_) {
      if (n != dims_.front()) return std::nullopt;
    }
    return dims_.front();
  }

 private:
  TruncationBox box_;
  std::vector<Eigen::Index> dims_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index total_ = 0;
};

/// The operator weights A^{(j)}_alpha : H_alpha -> H_{alpha+e_j} of a truncated
/// multishift. Weights are stored for |alpha| <= cap - 1, the only ones whose
/// target stays inside the box. Immutable after construction.
template <typename Scalar>
class WeightFamily {
 public:
  using Matrix = Mat<Scalar>;
  using Generator = std::function<Matrix(std::size_t axis, const MultiIndex& alpha)>;

  WeightFamily(TruncationBox box, FiberMap fibers, const Generator& gen)
      : layout_(std::make_shared<const FiberLayout>(box, fibers)), fibers_(std::move(fibers)) {
    const std::size_t d = box.dim();
    const std::size_t stored = box.layer_end(box.cap() - 1);
    weights_.assign(d, std::vector<Matrix>(stored));
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t r = 0; r < stored; ++r) {
        const MultiIndex& alpha = box.unrank(r);
        Matrix m = gen(j, alpha);
        check_shape(j, alpha, m);
        weights_[j][r] = std::move(m);
      }
    }
  }

  static WeightFamily zeros(TruncationBox box, FiberMap fibers) {
    FiberMap copy = fibers;
    return WeightFamily(std::move(box), std::move(fibers), [&](std::size_t j, const MultiIndex& a) {
      return Matrix::Zero(copy.dim(add_unit(a, j)), copy.dim(a)).eval();
    });
  }

  std::size_t dim() const { return layout_->box().dim(); }
  const TruncationBox& box() const { return layout_->box(); }
  int cap() const { return layout_->box().cap(); }
  const FiberMap& fibers() const { return fibers_; }
  const FiberLayout& layout() const { return *layout_; }
  std::shared_ptr<const FiberLayout> layout_ptr() const { return layout_; }

  Eigen::Index fiber_dim(const MultiIndex& alpha) const { return layout_->dim(alpha); }

  /// True when A^{(j)}_alpha is stored, i.e. |alpha| <= cap - 1.
  bool has_weight(const MultiIndex& alpha) const {
    return alpha.dim() == dim() && alpha.order() <= cap() - 1;
  }

  std::size_t stored_count() const { return weights_.empty() ? 0 : weights_.front().size(); }

  const Matrix& weight(std::size_t axis, const MultiIndex& alpha) const {
    if (axis >= dim()) throw DomainError("axis out of range");
    if (!has_weight(alpha)) {
      throw DomainError("no weight stored at " + alpha.to_string() + " for a box of cap " +
                        std::to_string(cap()));
    }
    return weights_[axis][box().rank(alpha)];
  }

  /// Weight by storage rank; rank < stored_count().
  const Matrix& weight(std::size_t axis, std::size_t rank) const { return weights_[axis][rank]; }

  /// Copy of this family with one weight replaced.
  WeightFamily with_weight(std::size_t axis, const MultiIndex& alpha, Matrix m) const {
    if (!has_weight(alpha) || axis >= dim()) {
      throw DomainError("no weight slot at " + alpha.to_string());
    }
    check_shape(axis, alpha, m);
    WeightFamily copy(*this);
    copy.weights_[axis][box().rank(alpha)] = std::move(m);
    return copy;
  }

 private:
  void check_shape(std::size_t j, const MultiIndex& alpha, const Matrix& m) const {
    const Eigen::Index rows = layout_->dim(add_unit(alpha, j));
    const Eigen::Index cols = layout_->dim(alpha);
    if (m.rows() != rows || m.cols() != cols) {
      throw ShapeError("weight (j=" + std::to_string(j + 1) + ", alpha=" + alpha.to_string() +
                       ") has shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                       ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
    }
  }

  std::shared_ptr<const FiberLayout> layout_;
  FiberMap fibers_;
  std::vector<std::vector<Matrix>> weights_;  // [axis][rank]
};

using Family = WeightFamily<cd>;

/// Location of a single weight A^{(axis)}_alpha.
struct WeightSite {
  std::size_t axis = 0;
  MultiIndex alpha;
};

/// sup_alpha ||A^{(j)}_alpha|| over the stored weights, per axis.
template <typename Scalar>
std::vector<double> check_bounded(const WeightFamily<Scalar>& fam) {
  std::vector<double> s(fam.dim(), 0.0);
  for (std::size_t j = 0; j < fam.dim(); ++j) {
    for (std::size_t r = 0; r < fam.stored_count(); ++r) {
      s[j] = std::max(s[j], linalg::op_norm(fam.weight(j, r)));
    }
  }
  return s;
}

struct CommutingWitness {
  MultiIndex alpha;
  std::size_t i = 0;
  std::size_t j = 0;
};

struct CommutingReport {
  bool commuting = true;
  double worst_residual = 0.0;
  std::optional<CommutingWitness> witness;
};

/// Relative residual of A^{(i)}_{alpha+e_j} A^{(j)}_alpha - A^{(j)}_{alpha+e_i} A^{(i)}_alpha,
/// scaled by max(1, ||A^{(i)}_{alpha+e_j} A^{(j)}_alpha||, ||A^{(j)}_{alpha+e_i} A^{(i)}_alpha||)
/// so that swapping i and j gives the same number.
template <typename Scalar>
double commuting_residual(const WeightFamily<Scalar>& fam, const MultiIndex& alpha, std::size_t i,
                          std::size_t j) {
  const auto lhs = (fam.weight(i, add_unit(alpha, j)) * fam.weight(j, alpha)).eval();
  const auto rhs = (fam.weight(j, add_unit(alpha, i)) * fam.weight(i, alpha)).eval();
  return linalg::op_norm(lhs - rhs) /
         std::max({1.0, linalg::op_norm(lhs), linalg::op_norm(rhs)});
}

/// Commuting condition on every alpha with |alpha| <= cap - 2 and i < j.
template <typename Scalar>
CommutingReport check_commuting(const WeightFamily<Scalar>& fam, double tol = 1e-10) {
  CommutingReport rep;
  for (const auto& alpha : fam.box()) {
    if (alpha.order() > fam.cap() - 2) break;
    for (std::size_t i = 0; i < fam.dim(); ++i) {
      for (std::size_t j = i + 1; j < fam.dim(); ++j) {
        const double res = commuting_residual(fam, alpha, i, j);
        if (res > rep.worst_residual) {
          rep.worst_residual = res;
          rep.witness = CommutingWitness{alpha, i, j};
        }
      }
    }
  }
  rep.commuting = rep.worst_residual <= tol;
  if (rep.commuting) rep.witness.reset();
  return rep;
}

struct InvertibilityReport {
  bool invertible = true;
  double min_sigma = std::numeric_limits<double>::infinity();
  std::optional<WeightSite> witness;
};

/// sigma_min(A^{(j)}_alpha) >= tol for all stored weights. Every weight must be square.
template <typename Scalar>
InvertibilityReport check_invertible(const WeightFamily<Scalar>& fam, double tol = 1e-12) {
  InvertibilityReport rep;
  for (std::size_t j = 0; j < fam.dim(); ++j) {
    for (std::size_t r = 0; r < fam.stored_count(); ++r) {
      const auto& a = fam.weight(j, r);
      if (a.rows() != a.cols()) {
        throw NotSquareError("weight (j=" + std::to_string(j + 1) + ", alpha=" +
                             fam.box().unrank(r).to_string() + ") is not square");
      }
      const double s = linalg::sigma_min(a);
      if (s < rep.min_sigma) rep.min_sigma = s;
      if (s < tol && rep.invertible) {
        rep.invertible = false;
        rep.witness = WeightSite{j, fam.box().unrank(r)};
      }
    }
  }
  return rep;
}

}  // namespace opshift
