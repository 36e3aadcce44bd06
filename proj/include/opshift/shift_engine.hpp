#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "opshift/weight_family.hpp"

namespace opshift {

/// An element (x_alpha) of the truncated direct sum, stored contiguously in the
/// layout's block order.
template <typename Scalar>
class TruncatedVector {
 public:
  using Vector = Vec<Scalar>;

  explicit TruncatedVector(std::shared_ptr<const FiberLayout> layout)
      : layout_(std::move(layout)), data_(Vector::Zero(layout_->total())) {}
  TruncatedVector(std::shared_ptr<const FiberLayout> layout, Vector data)
      : layout_(std::move(layout)), data_(std::move(data)) {
    if (data_.size() != layout_->total()) throw ShapeError("vector length does not match layout");
  }

  const FiberLayout& layout() const { return *layout_; }
  const std::shared_ptr<const FiberLayout>& layout_ptr() const { return layout_; }

  auto block(std::size_t rank) { return data_.segment(layout_->offset(rank), layout_->dim(rank)); }
  auto block(std::size_t rank) const {
    return data_.segment(layout_->offset(rank), layout_->dim(rank));
  }
  auto block(const MultiIndex& alpha) { return block(layout_->box().rank(alpha)); }
  auto block(const MultiIndex& alpha) const { return block(layout_->box().rank(alpha)); }

  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

  double norm() const { return data_.norm(); }

 private:
  std::shared_ptr<const FiberLayout> layout_;
  Vector data_;
};

/// T_j x: block alpha + e_j receives A^{(j)}_alpha x_alpha. Blocks that would land
/// outside the box are dropped.
template <typename Scalar>
TruncatedVector<Scalar> apply_T(const WeightFamily<Scalar>& fam, std::size_t j,
                                const TruncatedVector<Scalar>& x) {
  TruncatedVector<Scalar> y(fam.layout_ptr());
  const auto& box = fam.box();
  for (std::size_t r = 0; r < fam.stored_count(); ++r) {
    y.block(add_unit(box.unrank(r), j)) = fam.weight(j, r) * x.block(r);
  }
  return y;
}

/// T_j^* x: block alpha receives A^{(j)*}_alpha x_{alpha+e_j}; the top layer is zero.
template <typename Scalar>
TruncatedVector<Scalar> apply_T_adjoint(const WeightFamily<Scalar>& fam, std::size_t j,
                                        const TruncatedVector<Scalar>& x) {
  TruncatedVector<Scalar> y(fam.layout_ptr());
  const auto& box = fam.box();
  for (std::size_t r = 0; r < fam.stored_count(); ++r) {
    y.block(r) = fam.weight(j, r).adjoint() * x.block(add_unit(box.unrank(r), j));
  }
  return y;
}

/// A moment operator mapping H_source -> H_target.
template <typename Scalar>
struct MomentOperator {
  MultiIndex source;
  MultiIndex target;
  Mat<Scalar> matrix;
};

/// B(alpha, beta) = A^{(1)}(alpha, beta_1) A^{(2)}(alpha - beta_1 e_1, beta_2) ...,
/// where A^{(j)}(gamma, k) = A^{(j)}_{gamma-e_j} ... A^{(j)}_{gamma-k e_j}.
template <typename Scalar>
MomentOperator<Scalar> moment_B(const WeightFamily<Scalar>& fam, const MultiIndex& alpha,
                                const MultiIndex& beta) {
  if (!fam.box().contains(alpha)) throw DomainError("B: alpha " + alpha.to_string() + " outside box");
  if (!alpha.dominates(beta)) {
    throw DomainError("B: beta " + beta.to_string() + " is not <= alpha " + alpha.to_string());
  }
  const Eigen::Index n = fam.fiber_dim(alpha);
  Mat<Scalar> prod = Mat<Scalar>::Identity(n, n);
  MultiIndex cur = alpha;
  for (std::size_t j = 0; j < fam.dim(); ++j) {
    for (int step = 0; step < beta[j]; ++step) {
      cur = *sub_unit(cur, j);
      prod = (prod * fam.weight(j, cur)).eval();
    }
  }
  return {cur, alpha, std::move(prod)};
}

/// C(alpha, beta) = C^{(1)}(alpha, beta_1) C^{(2)}(alpha + beta_1 e_1, beta_2) ...,
/// where C^{(j)}(gamma, k) = A^{(j)*}_gamma ... A^{(j)*}_{gamma+(k-1)e_j}.
template <typename Scalar>
MomentOperator<Scalar> moment_C(const WeightFamily<Scalar>& fam, const MultiIndex& alpha,
                                const MultiIndex& beta) {
  if (alpha.dim() != fam.dim() || beta.dim() != fam.dim() ||
      !fam.box().contains(alpha + beta)) {
    throw DomainError("C: alpha + beta outside box");
  }
  const Eigen::Index n = fam.fiber_dim(alpha);
  Mat<Scalar> prod = Mat<Scalar>::Identity(n, n);
  MultiIndex cur = alpha;
  for (std::size_t j = 0; j < fam.dim(); ++j) {
    for (int step = 0; step < beta[j]; ++step) {
      prod = (prod * fam.weight(j, cur).adjoint()).eval();
      cur = add_unit(cur, j);
    }
  }
  return {cur, alpha, std::move(prod)};
}

/// B_alpha = B(alpha, alpha) : H_0 -> H_alpha.
template <typename Scalar>
Mat<Scalar> moment_diag(const WeightFamily<Scalar>& fam, const MultiIndex& alpha) {
  return moment_B(fam, alpha, alpha).matrix;
}

/// G_alpha = B_alpha^* B_alpha.
template <typename Scalar>
Mat<Scalar> gram_G(const WeightFamily<Scalar>& fam, const MultiIndex& alpha) {
  const Mat<Scalar> b = moment_diag(fam, alpha);
  return linalg::hermitian_part((b.adjoint() * b).eval());
}

/// T^beta x through the moment formula: block alpha is B(alpha, beta) x_{alpha-beta}.
template <typename Scalar>
TruncatedVector<Scalar> apply_power(const WeightFamily<Scalar>& fam, const MultiIndex& beta,
                                    const TruncatedVector<Scalar>& x) {
  TruncatedVector<Scalar> y(fam.layout_ptr());
  for (std::size_t r = 0; r < fam.box().size(); ++r) {
    const MultiIndex& alpha = fam.box().unrank(r);
    if (!alpha.dominates(beta)) continue;
    y.block(r) = moment_B(fam, alpha, beta).matrix * x.block(alpha - beta);
  }
  return y;
}

/// T^{*beta} x through the moment formula: block alpha is C(alpha, beta) x_{alpha+beta}
/// whenever alpha + beta stays in the box, zero otherwise.
template <typename Scalar>
TruncatedVector<Scalar> apply_adjoint_power(const WeightFamily<Scalar>& fam,
                                            const MultiIndex& beta,
                                            const TruncatedVector<Scalar>& x) {
  TruncatedVector<Scalar> y(fam.layout_ptr());
  for (std::size_t r = 0; r < fam.box().size(); ++r) {
    const MultiIndex& alpha = fam.box().unrank(r);
    if (!fam.box().contains(alpha + beta)) continue;
    y.block(r) = moment_C(fam, alpha, beta).matrix * x.block(alpha + beta);
  }
  return y;
}

/// Dense D x D matrix of T_j in block order.
template <typename Scalar>
Mat<Scalar> assemble_matrix(const WeightFamily<Scalar>& fam, std::size_t j) {
  const auto& lay = fam.layout();
  Mat<Scalar> m = Mat<Scalar>::Zero(lay.total(), lay.total());
  for (std::size_t r = 0; r < fam.stored_count(); ++r) {
    const auto target = add_unit(fam.box().unrank(r), j);
    const auto& a = fam.weight(j, r);
    m.block(lay.offset(target), lay.offset(r), a.rows(), a.cols()) = a;
  }
  return m;
}

struct NormalityVerdict {
  bool is_zero = true;
  /// First alpha (block order) where A^{(j)*}_alpha A^{(j)}_alpha differs from
  /// A^{(j)}_{alpha-e_j} A^{(j)*}_{alpha-e_j}.
  std::optional<MultiIndex> witness;
  double residual = 0.0;
};

/// Evaluates the recursion forced by normality of T_j. Normality of T_j forces
/// every weight on axis j to vanish, so the verdict reports whether T_j = 0.
template <typename Scalar>
NormalityVerdict normality_verdict(const WeightFamily<Scalar>& fam, std::size_t j,
                                   double tol = 1e-12) {
  NormalityVerdict v;
  for (std::size_t r = 0; r < fam.stored_count(); ++r) {
    const MultiIndex& alpha = fam.box().unrank(r);
    const auto& a = fam.weight(j, r);
    Mat<Scalar> lhs = a.adjoint() * a;
    Mat<Scalar> rhs = Mat<Scalar>::Zero(lhs.rows(), lhs.cols());
    if (auto prev = sub_unit(alpha, j)) {
      const auto& p = fam.weight(j, *prev);
      rhs = p * p.adjoint();
    }
    const double res = linalg::op_norm(lhs - rhs);
    if (res > tol && !v.witness) {
      v.witness = alpha;
      v.residual = res;
    }
    if (linalg::op_norm(a) > tol) v.is_zero = false;
  }
  return v;
}

/// Per-block orthonormal bases of ker T^*: the whole fiber at alpha = 0 and the
/// joint nullspace of the stacked A^{(j)*}_{alpha-e_j} elsewhere. Indexed by rank.
template <typename Scalar>
std::vector<Mat<Scalar>> kernel_of_adjoint(const WeightFamily<Scalar>& fam,
                                           double rel_tol = linalg::kRankTol) {
  const auto& box = fam.box();
  std::vector<Mat<Scalar>> out;
  out.reserve(box.size());
  for (std::size_t r = 0; r < box.size(); ++r) {
    const MultiIndex& alpha = box.unrank(r);
    const Eigen::Index n = fam.fiber_dim(alpha);
    if (alpha.is_zero()) {
      out.push_back(Mat<Scalar>::Identity(n, n));
      continue;
    }
    Eigen::Index rows = 0;
    for (std::size_t j = 0; j < fam.dim(); ++j) {
      if (auto prev = sub_unit(alpha, j)) rows += fam.fiber_dim(*prev);
    }
    Mat<Scalar> stack(rows, n);
    Eigen::Index row = 0;
    for (std::size_t j = 0; j < fam.dim(); ++j) {
      if (auto prev = sub_unit(alpha, j)) {
        const auto& a = fam.weight(j, *prev);
        stack.middleRows(row, a.cols()) = a.adjoint();
        row += a.cols();
      }
    }
    out.push_back(linalg::nullspace(stack, rel_tol));
  }
  return out;
}

/// ker T^* as a D x m matrix with orthonormal columns, in block order.
template <typename Scalar>
Mat<Scalar> kernel_of_adjoint_global(const WeightFamily<Scalar>& fam,
                                     double rel_tol = linalg::kRankTol) {
  const auto blocks = kernel_of_adjoint(fam, rel_tol);
  Eigen::Index m = 0;
  for (const auto& b : blocks) m += b.cols();
  Mat<Scalar> k = Mat<Scalar>::Zero(fam.layout().total(), m);
  Eigen::Index col = 0;
  for (std::size_t r = 0; r < blocks.size(); ++r) {
    k.block(fam.layout().offset(r), col, blocks[r].rows(), blocks[r].cols()) = blocks[r];
    col += blocks[r].cols();
  }
  return k;
}

}  // namespace opshift
