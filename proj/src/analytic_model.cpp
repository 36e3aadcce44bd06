#include "opshift/analytic_model.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "opshift/errors.hpp"

namespace opshift {

GramFamily::GramFamily(TruncationBox box, std::vector<MatrixXcd> g,
                       std::optional<std::vector<MatrixXcd>> factors)
    : box_(std::move(box)), g_(std::move(g)), b_(std::move(factors)) {
  if (g_.size() != box_.size()) throw ShapeError("one Gram matrix per index of the box is required");
  n_ = g_.front().rows();
  if ((g_.front() - MatrixXcd::Identity(n_, n_)).cwiseAbs().maxCoeff() > 1e-12) {
    throw DomainError("G_0 must be the identity");
  }
  g_inv_.reserve(g_.size());
  for (std::size_t r = 0; r < g_.size(); ++r) {
    auto& m = g_[r];
    if (m.rows() != n_ || m.cols() != n_) throw ShapeError("Gram matrices must share one square size");
    m = linalg::hermitian_part(m);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
    if (es.eigenvalues()(0) <= 0.0) {
      throw DomainError("G_" + box_.unrank(r).to_string() + " is not positive definite");
    }
    g_inv_.push_back(linalg::hermitian_part(
        (es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint())
            .eval()));
  }
  if (b_) {
    if (b_->size() != g_.size()) throw ShapeError("one factor per index of the box is required");
    b_inv_.emplace();
    for (const auto& m : *b_) b_inv_->push_back(m.inverse());
  }
}

GramFamily build_gram(const Family& fam, double tol_invert) {
  if (!fam.layout().constant_dim()) throw DomainError("the model needs a constant fiber dimension");
  const auto inv = check_invertible(fam, tol_invert);
  if (!inv.invertible) {
    throw DomainError("weight (j=" + std::to_string(inv.witness->axis + 1) +
                      ", alpha=" + inv.witness->alpha.to_string() + ") is not invertible");
  }
  std::vector<MatrixXcd> g, b;
  g.reserve(fam.box().size());
  b.reserve(fam.box().size());
  for (const auto& alpha : fam.box()) {
    b.push_back(moment_diag(fam, alpha));
    g.push_back(linalg::hermitian_part((b.back().adjoint() * b.back()).eval()));
  }
  return GramFamily(fam.box(), std::move(g), std::move(b));
}

Coefficients mz_apply(const Family& fam, std::size_t j, const Coefficients& f) {
  Coefficients out(fam.layout_ptr());
  for (std::size_t r = 0; r < fam.stored_count(); ++r) {
    out.block(add_unit(fam.box().unrank(r), j)) = f.block(r);
  }
  return out;
}

Coefficients mz_adjoint_apply(const Family& fam, const GramFamily& gram, std::size_t j,
                              const Coefficients& f) {
  if (!gram.has_factors()) throw DomainError("M_z^* needs the factors B_alpha");
  Coefficients out(fam.layout_ptr());
  const auto& box = fam.box();
  for (std::size_t r = 0; r < fam.stored_count(); ++r) {
    const std::size_t up = box.rank(add_unit(box.unrank(r), j));
    out.block(r) = gram.factor_inv(r) * fam.weight(j, r).adjoint() * gram.factor(up) * f.block(up);
  }
  return out;
}

cd h2_inner(const GramFamily& gram, const Coefficients& f, const Coefficients& g) {
  cd s = 0.0;
  for (std::size_t r = 0; r < gram.box().size(); ++r) {
    s += g.block(r).dot(gram.g(r) * f.block(r));
  }
  return s;
}

cd monomial(const std::vector<cd>& z, const MultiIndex& alpha) {
  cd p = 1.0;
  for (std::size_t j = 0; j < alpha.dim(); ++j) {
    for (int k = 0; k < alpha[j]; ++k) p *= z[j];
  }
  return p;
}

namespace {

std::vector<cd> conj_point(const std::vector<cd>& w) {
  std::vector<cd> c;
  for (const auto& v : w) c.push_back(std::conj(v));
  return c;
}

void check_point(const TruncationBox& box, const std::vector<cd>& w) {
  if (w.size() != box.dim()) throw DomainError("point has the wrong dimension");
}

}  // namespace

Coefficients eigenvector_build(const Family& fam, const GramFamily& gram, const std::vector<cd>& w,
                               const VectorXcd& x) {
  check_point(gram.box(), w);
  if (x.norm() == 0.0) throw DomainError("x must be non-zero");
  const auto wc = conj_point(w);
  Coefficients f(fam.layout_ptr());
  for (std::size_t r = 0; r < gram.box().size(); ++r) {
    f.block(r) = monomial(wc, gram.box().unrank(r)) * (gram.g_inv(r) * x);
  }
  return f;
}

double eigenvector_residual(const Family& fam, const GramFamily& gram, const std::vector<cd>& w,
                            const Coefficients& f) {
  double worst = 0.0;
  const Eigen::Index inner = fam.layout().offset(fam.stored_count());
  for (std::size_t j = 0; j < fam.dim(); ++j) {
    const auto g = mz_adjoint_apply(fam, gram, j, f);
    const VectorXcd diff = (g.data() - std::conj(w[j]) * f.data()).head(inner);
    worst = std::max(worst, diff.norm());
  }
  return worst / std::max(1.0, f.norm());
}

KernelValue kernel_eval(const GramFamily& gram, const std::vector<cd>& z, const std::vector<cd>& w) {
  check_point(gram.box(), z);
  check_point(gram.box(), w);
  const auto wc = conj_point(w);
  const Eigen::Index n = gram.fiber_dim();
  KernelValue k{MatrixXcd::Zero(n, n), 0.0};
  MatrixXcd last = MatrixXcd::Zero(n, n);
  for (std::size_t r = 0; r < gram.box().size(); ++r) {
    const auto& alpha = gram.box().unrank(r);
    const MatrixXcd term = monomial(z, alpha) * monomial(wc, alpha) * gram.g_inv(r);
    k.value += term;
    if (alpha.order() == gram.box().cap()) last += term;
  }
  k.last_layer_norm = linalg::op_norm(last);
  return k;
}

std::string to_string(SeriesClass c) {
  switch (c) {
    case SeriesClass::bpe: return "bpe";
    case SeriesClass::not_bpe: return "not_bpe";
    default: return "inconclusive";
  }
}

std::string to_string(PointSpecStatus s) {
  switch (s) {
    case PointSpecStatus::in_point_spectrum: return "in_point_spectrum";
    case PointSpecStatus::not_detected: return "not_detected";
    default: return "inconclusive";
  }
}

SeriesVerdict classify_series(std::vector<double> partial_sums, const BpePolicy& policy) {
  SeriesVerdict v;
  v.partial_sums = std::move(partial_sums);
  const auto& s = v.partial_sums;
  v.s_last = s.back();
  if (!std::isfinite(v.s_last) || v.s_last > policy.cap) {
    v.classification = SeriesClass::not_bpe;
    v.ratio_estimate = std::numeric_limits<double>::infinity();
    return v;
  }
  const int last = static_cast<int>(s.size()) - 1;
  const int window = std::min(policy.window, last - 1);
  if (window < 1) return v;
  auto inc = [&](int l) { return std::max(0.0, s[l] - s[l - 1]); };
  const double newest = inc(last);
  const double oldest = inc(last - window);
  const double negligible = 1e-15 * std::max(1.0, v.s_last);
  bool all_small = true;
  for (int l = last - window; l <= last; ++l) all_small = all_small && inc(l) <= negligible;
  if (all_small) {
    v.ratio_estimate = 0.0;
    v.classification = SeriesClass::bpe;
    return v;
  }
  if (oldest <= negligible) {
    v.ratio_estimate = std::numeric_limits<double>::infinity();
    v.classification = SeriesClass::not_bpe;
    return v;
  }
  v.ratio_estimate = std::pow(newest / oldest, 1.0 / window);
  if (v.ratio_estimate <= 1.0 - policy.margin) {
    v.classification = SeriesClass::bpe;
  } else if (v.ratio_estimate >= 1.0 + policy.margin) {
    v.classification = SeriesClass::not_bpe;
  }
  return v;
}

namespace {

int top_layer(const GramFamily& gram, const BpePolicy& policy) {
  const int top = policy.max_layer.value_or(gram.box().cap());
  if (top < 1 || top > gram.box().cap()) {
    throw DomainError("max layer must lie in 1.." + std::to_string(gram.box().cap()));
  }
  return top;
}

}  // namespace

BpeVerdict bpe_test(const GramFamily& gram, const std::vector<cd>& w, const BpePolicy& policy) {
  check_point(gram.box(), w);
  const int top = top_layer(gram, policy);
  const Eigen::Index n = gram.fiber_dim();
  MatrixXcd sum = MatrixXcd::Zero(n, n);
  std::vector<double> partial;
  std::size_t r = 0;
  for (int layer = 0; layer <= top; ++layer) {
    for (; r < gram.box().layer_end(layer); ++r) {
      sum += std::norm(monomial(w, gram.box().unrank(r))) * gram.g_inv(r);
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(linalg::hermitian_part(sum), Eigen::EigenvaluesOnly);
    partial.push_back(es.eigenvalues()(n - 1));
  }
  return {w, classify_series(std::move(partial), policy)};
}

SeriesVerdict direction_series(const GramFamily& gram, const std::vector<cd>& w, const VectorXcd& u,
                               const BpePolicy& policy) {
  check_point(gram.box(), w);
  const int top = top_layer(gram, policy);
  double sum = 0.0;
  std::vector<double> partial;
  std::size_t r = 0;
  for (int layer = 0; layer <= top; ++layer) {
    for (; r < gram.box().layer_end(layer); ++r) {
      sum += std::norm(monomial(w, gram.box().unrank(r))) * u.dot(gram.g_inv(r) * u).real();
    }
    partial.push_back(sum);
  }
  return classify_series(std::move(partial), policy);
}

std::optional<MatrixXcd> common_eigenbasis(const GramFamily& gram, std::uint64_t seed, double tol) {
  const Eigen::Index n = gram.fiber_dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXcd combo = MatrixXcd::Zero(n, n);
  for (std::size_t r = 0; r < gram.box().size(); ++r) {
    combo += g(rng) * gram.g(r) / linalg::op_norm(gram.g(r));
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(linalg::hermitian_part(combo));
  const MatrixXcd v = es.eigenvectors();
  for (std::size_t r = 0; r < gram.box().size(); ++r) {
    MatrixXcd d = v.adjoint() * gram.g(r) * v;
    const double scale = linalg::op_norm(gram.g(r));
    d.diagonal().setZero();
    if (d.cwiseAbs().maxCoeff() > tol * scale) return std::nullopt;
  }
  return v;
}

PointSpecVerdict pointspec_test(const GramFamily& gram, const std::vector<cd>& w,
                                const BpePolicy& policy) {
  PointSpecVerdict out;
  out.directions = common_eigenbasis(gram);
  if (!out.directions) return out;
  bool all_diverge = true;
  for (Eigen::Index k = 0; k < out.directions->cols(); ++k) {
    out.per_direction.push_back(direction_series(gram, w, out.directions->col(k), policy));
    const auto c = out.per_direction.back().classification;
    if (c == SeriesClass::bpe && !out.witness) out.witness = k;
    all_diverge = all_diverge && c == SeriesClass::not_bpe;
  }
  if (out.witness) {
    out.status = PointSpecStatus::in_point_spectrum;
  } else if (all_diverge) {
    out.status = PointSpecStatus::not_detected;
  }
  return out;
}

bool is_diagonal(const GramFamily& gram, double tol) {
  for (std::size_t r = 0; r < gram.box().size(); ++r) {
    MatrixXcd off = gram.g(r);
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() > tol * linalg::op_norm(gram.g(r))) return false;
  }
  return true;
}

GramFamily diagonal_component(const GramFamily& gram, Eigen::Index k) {
  std::vector<MatrixXcd> g;
  for (std::size_t r = 0; r < gram.box().size(); ++r) g.push_back(gram.g(r).block(k, k, 1, 1));
  return GramFamily(gram.box(), std::move(g));
}

GridScan bpe_grid_scan(const GramFamily& gram, const std::vector<double>& radii,
                       const std::vector<std::vector<cd>>& directions, const BpePolicy& policy) {
  GridScan scan;
  scan.diagonal = is_diagonal(gram);
  std::vector<GramFamily> parts;
  if (scan.diagonal) {
    for (Eigen::Index k = 0; k < gram.fiber_dim(); ++k) parts.push_back(diagonal_component(gram, k));
  }
  for (const auto& dir : directions) {
    for (double r : radii) {
      std::vector<cd> w;
      for (const auto& c : dir) w.push_back(r * c);
      GridRow row{bpe_test(gram, w, policy), {}, std::nullopt, false};
      if (row.verdict.series.classification == SeriesClass::inconclusive) ++scan.inconclusive;
      if (scan.diagonal) {
        bool all_bpe = true, any_not = false;
        for (const auto& p : parts) {
          const auto c = bpe_test(p, w, policy).series.classification;
          row.components.push_back(c);
          all_bpe = all_bpe && c == SeriesClass::bpe;
          any_not = any_not || c == SeriesClass::not_bpe;
        }
        if (all_bpe) row.expected = SeriesClass::bpe;
        if (any_not) row.expected = SeriesClass::not_bpe;
        const auto got = row.verdict.series.classification;
        row.disagrees = row.expected && got != SeriesClass::inconclusive && got != *row.expected;
        if (row.disagrees) ++scan.disagreements;
      }
      scan.rows.push_back(std::move(row));
    }
  }
  return scan;
}

std::string grid_csv(const GridScan& scan, std::size_t d) {
  std::ostringstream os;
  for (std::size_t j = 1; j <= d; ++j) os << "w_" << j << "_re,w_" << j << "_im,";
  os << "classification,S_last,ratio_estimate\n";
  char buf[40];
  auto num = [&](double v) {
    if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& row : scan.rows) {
    for (const auto& c : row.verdict.w) os << num(c.real()) << ',' << num(c.imag()) << ',';
    os << to_string(row.verdict.series.classification) << ',' << num(row.verdict.series.s_last) << ','
       << num(row.verdict.series.ratio_estimate) << '\n';
  }
  return os.str();
}

}  // namespace opshift
