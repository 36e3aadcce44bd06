#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "opshift/shift_engine.hpp"

namespace opshift {

/// U_lambda acts on block alpha by conj(lambda)^alpha.
inline std::vector<cd> circular_phases(const TruncationBox& box, const std::vector<cd>& lambda) {
  std::vector<cd> phases;
  phases.reserve(box.size());
  for (const auto& alpha : box) {
    cd p = 1.0;
    for (std::size_t j = 0; j < box.dim(); ++j) {
      for (int k = 0; k < alpha[j]; ++k) p *= std::conj(lambda[j]);
    }
    phases.push_back(p);
  }
  return phases;
}

/// max_j ||U_lambda^* T_j U_lambda - lambda_j T_j|| on the assembled matrices.
template <typename Scalar>
double circular_residual(const WeightFamily<Scalar>& fam, const std::vector<cd>& lambda) {
  if (lambda.size() != fam.dim()) throw DomainError("lambda has wrong dimension");
  for (const auto& l : lambda) {
    if (std::abs(std::abs(l) - 1.0) > 1e-12) throw DomainError("lambda must lie on the torus");
  }
  const auto& lay = fam.layout();
  const auto phases = circular_phases(fam.box(), lambda);
  MatrixXcd u = MatrixXcd::Zero(lay.total(), lay.total());
  for (std::size_t r = 0; r < fam.box().size(); ++r) {
    for (Eigen::Index i = 0; i < lay.dim(r); ++i) u(lay.offset(r) + i, lay.offset(r) + i) = phases[r];
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < fam.dim(); ++j) {
    const MatrixXcd t = assemble_matrix(fam, j).template cast<cd>();
    const MatrixXcd diff = u.adjoint() * t * u - lambda[j] * t;
    worst = std::max(worst, linalg::op_norm(diff));
  }
  return worst;
}

/// Images T^alpha(ker T^*) for every alpha in the box, each as a D x m matrix
/// (columns that leave the box are truncated to zero).
template <typename Scalar>
std::vector<Mat<Scalar>> wandering_images(const WeightFamily<Scalar>& fam,
                                          double rel_tol = linalg::kRankTol) {
  const Mat<Scalar> k = kernel_of_adjoint_global(fam, rel_tol);
  std::vector<Mat<Scalar>> images;
  images.reserve(fam.box().size());
  for (const auto& alpha : fam.box()) {
    Mat<Scalar> img(k.rows(), k.cols());
    for (Eigen::Index c = 0; c < k.cols(); ++c) {
      TruncatedVector<Scalar> x(fam.layout_ptr(), k.col(c));
      img.col(c) = apply_power(fam, alpha, x).data();
    }
    images.push_back(std::move(img));
  }
  return images;
}

struct WanderingReport {
  Eigen::Index span_dim = 0;
  Eigen::Index total_dim = 0;
  bool full() const { return span_dim == total_dim; }
};

/// Dimension of span{T^alpha(ker T^*) : alpha in box}, a statement about the
/// truncated space only.
template <typename Scalar>
WanderingReport wandering_span_dim(const WeightFamily<Scalar>& fam,
                                   double rel_tol = linalg::kRankTol) {
  const auto images = wandering_images(fam, rel_tol);
  Eigen::Index cols = 0;
  for (const auto& img : images) cols += img.cols();
  Mat<Scalar> all(fam.layout().total(), cols);
  Eigen::Index c = 0;
  for (const auto& img : images) {
    for (Eigen::Index k = 0; k < img.cols(); ++k) {
      const double nrm = img.col(k).norm();
      all.col(c++) = nrm > 0.0 ? (img.col(k) / nrm).eval() : img.col(k).eval();
    }
  }
  return {linalg::numerical_rank(all, rel_tol), fam.layout().total()};
}

struct AnalyticDepth {
  /// rank of T_j^k for k = 0..max_power.
  std::vector<Eigen::Index> ranks;
  /// ran T_j^k meets no block with alpha_j < k.
  bool support_ok = true;
};

template <typename Scalar>
AnalyticDepth analytic_depth(const WeightFamily<Scalar>& fam, std::size_t j,
                             std::optional<int> max_power = std::nullopt,
                             double rel_tol = linalg::kRankTol) {
  const int kmax = max_power.value_or(fam.cap());
  const auto& lay = fam.layout();
  const Mat<Scalar> t = assemble_matrix(fam, j);
  Mat<Scalar> power = Mat<Scalar>::Identity(lay.total(), lay.total());
  AnalyticDepth out;
  for (int k = 0; k <= kmax; ++k) {
    out.ranks.push_back(linalg::numerical_rank(power, rel_tol));
    for (std::size_t r = 0; r < fam.box().size(); ++r) {
      if (fam.box().unrank(r)[j] >= k) continue;
      if (!power.middleRows(lay.offset(r), lay.dim(r)).isZero(0.0)) out.support_ok = false;
    }
    power = (t * power).eval();
  }
  return out;
}

/// Result of reducing a toral left invertible family to invertible weights on
/// ker T^*.
template <typename Scalar>
struct Reduction {
  WeightFamily<Scalar> family;
  /// Orthonormal bases Q_alpha (D x m) of T^alpha(ker T^*), by rank in the reduced box.
  std::vector<Mat<Scalar>> bases;
  /// max ||T_j Q_alpha - Q_{alpha+e_j} A~^{(j)}_alpha|| over the reduced box.
  double intertwining_residual = 0.0;
};

struct NotApplicable {
  std::string reason;
  std::optional<MultiIndex> alpha;
  std::optional<MultiIndex> beta;
};

template <typename Scalar>
using ReductionResult = std::variant<Reduction<Scalar>, NotApplicable>;

/// Reduce a toral left invertible family whose wandering images are mutually
/// orthogonal to a family with invertible weights on ker T^*.
///
/// On a truncation, kernel vectors living at level g only have images up to
/// degree cap - g, so the reduced family lives on the box of cap
/// cap - g_max where g_max is the highest level carrying kernel vectors.
template <typename Scalar>
ReductionResult<Scalar> left_invertible_reduce(const WeightFamily<Scalar>& fam,
                                               double tol = 1e-12,
                                               double ortho_tol = 1e-10) {
  for (std::size_t j = 0; j < fam.dim(); ++j) {
    for (std::size_t r = 0; r < fam.stored_count(); ++r) {
      const auto& a = fam.weight(j, r);
      if (a.rows() < a.cols() || linalg::sigma_min(a) < tol) {
        return NotApplicable{"weight (j=" + std::to_string(j + 1) + ") is not injective",
                             fam.box().unrank(r), std::nullopt};
      }
    }
  }

  const auto kernel_blocks = kernel_of_adjoint(fam);
  int top_level = 0;
  for (std::size_t r = 0; r < kernel_blocks.size(); ++r) {
    if (kernel_blocks[r].cols() > 0) top_level = std::max(top_level, fam.box().unrank(r).order());
  }

  auto images = wandering_images(fam);
  std::vector<Mat<Scalar>> bases;
  bases.reserve(images.size());
  for (auto& img : images) {
    Mat<Scalar> q = linalg::range_basis(img);
    linalg::normalize_phases(q);
    bases.push_back(std::move(q));
  }

  for (std::size_t a = 0; a < bases.size(); ++a) {
    for (std::size_t b = a + 1; b < bases.size(); ++b) {
      if (bases[a].cols() == 0 || bases[b].cols() == 0) continue;
      const double overlap = (bases[a].adjoint() * bases[b]).cwiseAbs().maxCoeff();
      if (overlap > ortho_tol) {
        return NotApplicable{"wandering images are not orthogonal", fam.box().unrank(a),
                             fam.box().unrank(b)};
      }
    }
  }

  const int reduced_cap = fam.cap() - top_level;
  if (reduced_cap < 1) {
    return NotApplicable{"kernel reaches the top of the box; no reduced window remains",
                         std::nullopt, std::nullopt};
  }
  const Eigen::Index m = bases.front().cols();
  TruncationBox rbox(fam.dim(), reduced_cap);
  for (const auto& alpha : rbox) {
    if (bases[fam.box().rank(alpha)].cols() != m) {
      return NotApplicable{"wandering image dimension drops", alpha, std::nullopt};
    }
  }

  std::vector<Mat<Scalar>> rbases;
  for (const auto& alpha : rbox) rbases.push_back(bases[fam.box().rank(alpha)]);

  std::vector<Mat<Scalar>> assembled;
  for (std::size_t j = 0; j < fam.dim(); ++j) assembled.push_back(assemble_matrix(fam, j));

  WeightFamily<Scalar> reduced(rbox, FiberMap(static_cast<int>(m)),
                               [&](std::size_t j, const MultiIndex& alpha) {
                                 const auto& q = rbases[rbox.rank(alpha)];
                                 const auto& q_next = rbases[rbox.rank(add_unit(alpha, j))];
                                 return (q_next.adjoint() * assembled[j] * q).eval();
                               });

  double residual = 0.0;
  for (std::size_t j = 0; j < fam.dim(); ++j) {
    for (std::size_t r = 0; r < reduced.stored_count(); ++r) {
      const MultiIndex& alpha = rbox.unrank(r);
      const auto& q = rbases[r];
      const auto& q_next = rbases[rbox.rank(add_unit(alpha, j))];
      residual = std::max(residual,
                          linalg::op_norm(assembled[j] * q - q_next * reduced.weight(j, r)));
    }
  }
  return Reduction<Scalar>{std::move(reduced), std::move(rbases), residual};
}

}  // namespace opshift
