#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opshift/shift_engine.hpp"

namespace opshift {

/// G_alpha = B_alpha^* B_alpha on a box with constant fiber dimension n.
class GramFamily {
 public:
  /// Validates G_0 = I and positive definiteness; takes matrices by rank.
  GramFamily(TruncationBox box, std::vector<MatrixXcd> g,
             std::optional<std::vector<MatrixXcd>> factors = std::nullopt);

  const TruncationBox& box() const { return box_; }
  Eigen::Index fiber_dim() const { return n_; }
  const MatrixXcd& g(std::size_t rank) const { return g_[rank]; }
  const MatrixXcd& g(const MultiIndex& alpha) const { return g_[box_.rank(alpha)]; }
  const MatrixXcd& g_inv(std::size_t rank) const { return g_inv_[rank]; }
  const MatrixXcd& g_inv(const MultiIndex& alpha) const { return g_inv_[box_.rank(alpha)]; }
  bool has_factors() const { return b_.has_value(); }
  /// B_alpha when the family was built from weights.
  const MatrixXcd& factor(std::size_t rank) const { return b_->at(rank); }
  const MatrixXcd& factor_inv(std::size_t rank) const { return b_inv_->at(rank); }

 private:
  TruncationBox box_;
  Eigen::Index n_ = 0;
  std::vector<MatrixXcd> g_;
  std::vector<MatrixXcd> g_inv_;
  std::optional<std::vector<MatrixXcd>> b_;
  std::optional<std::vector<MatrixXcd>> b_inv_;
};

/// Requires constant fibers and invertible weights (DomainError otherwise).
GramFamily build_gram(const Family& fam, double tol_invert = 1e-12);

/// Coefficients of a polynomial sum_alpha x_alpha z^alpha, one block per alpha.
using Coefficients = TruncatedVector<cd>;

/// z_j f: the coefficient at alpha + e_j is x_alpha; the top layer is dropped.
Coefficients mz_apply(const Family& fam, std::size_t j, const Coefficients& f);

/// M_{z_j}^* f: coefficient at alpha is B_alpha^{-1} A^{(j)*}_alpha B_{alpha+e_j} x_{alpha+e_j};
/// zero on the top layer.
Coefficients mz_adjoint_apply(const Family& fam, const GramFamily& gram, std::size_t j,
                              const Coefficients& f);

/// <f, g> = sum_alpha g_alpha^* G_alpha f_alpha.
cd h2_inner(const GramFamily& gram, const Coefficients& f, const Coefficients& g);

/// f_alpha = conj(w)^alpha G_alpha^{-1} x, an eigenvector of every M_{z_j}^* for
/// the eigenvalue conj(w_j) away from the top layer.
Coefficients eigenvector_build(const Family& fam, const GramFamily& gram, const std::vector<cd>& w,
                               const VectorXcd& x);

/// max_j ||(M_{z_j}^* - conj(w_j)) f|| over blocks with |alpha| <= cap - 1,
/// relative to max(1, ||f||).
double eigenvector_residual(const Family& fam, const GramFamily& gram, const std::vector<cd>& w,
                            const Coefficients& f);

/// z^alpha for a point z.
cd monomial(const std::vector<cd>& z, const MultiIndex& alpha);

struct KernelValue {
  MatrixXcd value;
  /// Norm of the contribution of the top layer.
  double last_layer_norm = 0.0;
};

/// Partial sum of kappa(z, w) = sum_alpha G_alpha^{-1} z^alpha conj(w)^alpha over the box.
KernelValue kernel_eval(const GramFamily& gram, const std::vector<cd>& z, const std::vector<cd>& w);

struct BpePolicy {
  /// Highest layer summed; defaults to the cap of the Gram box.
  std::optional<int> max_layer;
  int window = 5;
  double margin = 1e-3;
  double cap = 1e12;
};

enum class SeriesClass { bpe, not_bpe, inconclusive };
std::string to_string(SeriesClass c);

struct SeriesVerdict {
  SeriesClass classification = SeriesClass::inconclusive;
  /// S_L for L = 0..max_layer.
  std::vector<double> partial_sums;
  double ratio_estimate = 0.0;
  double s_last = 0.0;
};

/// Classifies a nondecreasing sequence of partial sums by the geometric ratio
/// of its last `window` increments.
SeriesVerdict classify_series(std::vector<double> partial_sums, const BpePolicy& policy);

struct BpeVerdict {
  std::vector<cd> w;
  SeriesVerdict series;
};

/// S_L = lambda_max(sum_{|alpha| <= L} |w^alpha|^2 G_alpha^{-1}).
BpeVerdict bpe_test(const GramFamily& gram, const std::vector<cd>& w, const BpePolicy& policy = {});

/// Partial sums of sum_alpha |w^alpha|^2 u^* G_alpha^{-1} u along a fixed vector u.
SeriesVerdict direction_series(const GramFamily& gram, const std::vector<cd>& w, const VectorXcd& u,
                               const BpePolicy& policy = {});

/// Shared eigenbasis of all G_alpha, or nullopt when the family is not
/// simultaneously diagonalizable within tolerance.
std::optional<MatrixXcd> common_eigenbasis(const GramFamily& gram, std::uint64_t seed = 42,
                                           double tol = 1e-9);

enum class PointSpecStatus { in_point_spectrum, not_detected, inconclusive };
std::string to_string(PointSpecStatus s);

struct PointSpecVerdict {
  PointSpecStatus status = PointSpecStatus::inconclusive;
  /// Shared eigenvectors (columns) and the series verdict along each.
  std::optional<MatrixXcd> directions;
  std::vector<SeriesVerdict> per_direction;
  /// Index of a convergent direction when one exists.
  std::optional<Eigen::Index> witness;
};

PointSpecVerdict pointspec_test(const GramFamily& gram, const std::vector<cd>& w,
                                const BpePolicy& policy = {});

struct GridRow {
  BpeVerdict verdict;
  /// Per-component scalar verdicts, diagonal families only.
  std::vector<SeriesClass> components;
  std::optional<SeriesClass> expected;
  bool disagrees = false;
};

struct GridScan {
  bool diagonal = false;
  std::vector<GridRow> rows;
  int disagreements = 0;
  int inconclusive = 0;
};

/// True when every G_alpha is diagonal.
bool is_diagonal(const GramFamily& gram, double tol = 1e-12);

/// The scalar Gram family of the k-th diagonal entry.
GramFamily diagonal_component(const GramFamily& gram, Eigen::Index k);

/// bpe_test at w = r u for every radius r and direction u; for diagonal
/// families also checks that the verdict is the intersection of the scalar
/// component verdicts.
GridScan bpe_grid_scan(const GramFamily& gram, const std::vector<double>& radii,
                       const std::vector<std::vector<cd>>& directions, const BpePolicy& policy = {});

/// Columns w_1_re, w_1_im, ..., classification, S_last, ratio_estimate.
std::string grid_csv(const GridScan& scan, std::size_t d);

}  // namespace opshift
