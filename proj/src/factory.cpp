#include "opshift/factory.hpp"

#include <cmath>

#include "opshift/errors.hpp"

namespace opshift {

namespace {

double norm_w(const ScalarPhiSpec& spec, const MultiIndex& alpha) {
  double s = 0.0;
  for (std::size_t j = 0; j < spec.d; ++j) s += std::norm(spec.w(j, alpha));
  return std::sqrt(s);
}

double norm_w_tilde(const ScalarPhiSpec& spec, const MultiIndex& alpha) {
  double s = 0.0;
  for (std::size_t j = 0; j < spec.d; ++j) {
    if (auto prev = sub_unit(alpha, j)) s += std::norm(spec.w(j, *prev));
  }
  return std::sqrt(s);
}

void record(ClassCheck& c, const MultiIndex& alpha, double norm_value, double direct_value,
            bool ok_norm, bool ok_direct) {
  if (ok_norm != ok_direct ||
      std::abs(norm_value - direct_value) > 1e-10 * std::max(1.0, norm_value)) {
    c.paths_agree = false;
  }
  if (!ok_norm) {
    c.holds = false;
    c.violations.push_back({alpha, norm_value});
  }
}

}  // namespace

Family generate(const ScalarPhiSpec& spec, int cap, double tol) {
  const TruncationBox box(spec.d, cap);
  for (const auto& alpha : box) {
    if (alpha.order() > cap - 2) break;
    for (std::size_t i = 0; i < spec.d; ++i) {
      for (std::size_t j = i + 1; j < spec.d; ++j) {
        const cd lhs = spec.w(j, add_unit(alpha, i)) * spec.w(i, alpha);
        const cd rhs = spec.w(i, add_unit(alpha, j)) * spec.w(j, alpha);
        if (std::abs(lhs - rhs) > tol * std::max(1.0, std::abs(lhs))) {
          throw SpecError("scalar weights fail the commuting identity at alpha=" +
                          alpha.to_string() + " for axes " + std::to_string(i + 1) + "," +
                          std::to_string(j + 1));
        }
      }
    }
  }
  std::vector<MatrixXcd> profile;
  for (int n = 0; n < cap; ++n) profile.push_back(spec.phi(n));
  const Eigen::Index dim = profile.empty() ? 1 : profile.front().rows();
  for (int n = 0; n < cap; ++n) {
    if (profile[n].rows() != dim || profile[n].cols() != dim) {
      throw SpecError("Phi(" + std::to_string(n) + ") is not " + std::to_string(dim) + "x" +
                      std::to_string(dim));
    }
  }
  return Family(box, FiberMap(static_cast<int>(dim)), [&](std::size_t j, const MultiIndex& alpha) {
    return (spec.w(j, alpha) * profile[alpha.order()]).eval();
  });
}

Family classical(std::size_t d, int cap, const std::function<cd(std::size_t, const MultiIndex&)>& w,
                 int n) {
  ScalarPhiSpec spec{d, w, [n](int) { return MatrixXcd::Identity(n, n).eval(); }};
  return generate(spec, cap);
}

ScalarPhiSpec example33_spec(std::size_t d) {
  ScalarPhiSpec spec;
  spec.d = d;
  spec.w = [](std::size_t j, const MultiIndex& alpha) {
    return cd(0.5 * std::sqrt((alpha[j] + 1.0) / (alpha.order() + 1.0)), 0.0);
  };
  spec.phi = [](int n) {
    double phi, psi;
    if (n == 0) {
      // Chosen so that w_0 Phi(0) is the printed A_0.
      phi = 1.0 / std::sqrt(3.0);
      psi = 1.0;
    } else {
      phi = std::sqrt((n + 2.0) / (n + 3.0));
      psi = std::sqrt(n / (n + 1.0));
    }
    MatrixXcd m(2, 2);
    m << phi + psi, phi - psi, phi - psi, phi + psi;
    return m;
  };
  return spec;
}

Family example33(std::size_t d, int cap) { return generate(example33_spec(d), cap); }

Family diag_powers(std::size_t d, int cap, cd a, cd b) { return diagonal_family(d, cap, {a, b}); }

Family diagonal_family(std::size_t d, int cap, const std::vector<cd>& values) {
  VectorXcd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
  const MatrixXcd m = v.asDiagonal();
  return Family(TruncationBox(d, cap), FiberMap(static_cast<int>(values.size())),
                [&](std::size_t, const MultiIndex&) { return m; });
}

MatrixXcd remark34_closed_form(const MultiIndex& alpha) {
  if (alpha.is_zero()) return MatrixXcd::Identity(2, 2);
  const double n = alpha.order();
  const double s = 0.5 * std::sqrt(multinomial(alpha));
  const double p = std::sqrt(n + 2.0), q = std::sqrt(n);
  MatrixXcd m(2, 2);
  m << s * (p + q), s * (p - q), s * (p - q), s * (p + q);
  return m;
}

Remark34 remark34(std::size_t d, int cap, Remark34Convention convention) {
  const TruncationBox box(d, cap);
  std::vector<MatrixXcd> b;
  b.reserve(box.size());
  for (const auto& alpha : box) {
    if (alpha.is_zero()) {
      b.push_back(MatrixXcd::Identity(2, 2));
      continue;
    }
    const double n = alpha.order();
    MatrixXcd m(2, 2);
    m << n + 1.0, 1.0, 1.0, n + 1.0;
    b.push_back(std::sqrt(multinomial(alpha)) * linalg::hermitian_sqrt(m));
  }
  Family fam(box, FiberMap(2), [&](std::size_t j, const MultiIndex& alpha) {
    const MatrixXcd& here = b[box.rank(alpha)];
    const MatrixXcd& next = b[box.rank(add_unit(alpha, j))];
    if (convention == Remark34Convention::as_printed) return (here * next.inverse()).eval();
    return (next * here.inverse()).eval();
  });
  return {std::move(b), std::move(fam)};
}

MatrixXcd random_gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXcd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = g(rng);
      const double im = g(rng);
      m(r, c) = cd(re, im) / std::sqrt(2.0);
    }
  }
  return m;
}

MatrixXcd random_unitary(Eigen::Index n, std::mt19937_64& rng) {
  const MatrixXcd z = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<MatrixXcd> qr(z);
  MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(n, n);
  const MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column phases so the distribution is Haar.
  for (Eigen::Index i = 0; i < n; ++i) {
    const cd p = r(i, i);
    if (std::abs(p) > 0.0) q.col(i) *= p / std::abs(p);
  }
  return q;
}

Family family_from_factors(const TruncationBox& box, const std::vector<MatrixXcd>& b) {
  if (b.size() != box.size()) throw ShapeError("one factor per index of the box is required");
  const Eigen::Index n = b.front().rows();
  std::vector<MatrixXcd> inv;
  inv.reserve(b.size());
  for (const auto& m : b) {
    if (m.rows() != n || m.cols() != n) throw ShapeError("factors must be square of equal size");
    inv.push_back(m.inverse());
  }
  return Family(box, FiberMap(static_cast<int>(n)), [&](std::size_t j, const MultiIndex& alpha) {
    return (b[box.rank(add_unit(alpha, j))] * inv[box.rank(alpha)]).eval();
  });
}

Family random_commuting_family(std::size_t d, int n, int cap, std::uint64_t seed, double spread) {
  const TruncationBox box(d, cap);
  std::mt19937_64 rng(seed);
  std::vector<MatrixXcd> b;
  b.reserve(box.size());
  for (const auto& alpha : box) {
    if (alpha.is_zero()) {
      b.push_back(MatrixXcd::Identity(n, n));
      continue;
    }
    b.push_back(MatrixXcd::Identity(n, n) + spread * random_gaussian(n, n, rng) / std::sqrt(n));
  }
  return family_from_factors(box, b);
}

Family random_unilateral(const std::vector<int>& fiber_dims, std::uint64_t seed) {
  if (fiber_dims.size() < 2) throw BoxError("need at least two fibers");
  const int cap = static_cast<int>(fiber_dims.size()) - 1;
  FiberMap fibers(fiber_dims.front());
  for (int k = 1; k <= cap; ++k) {
    if (fiber_dims[k] != fibers.default_dim) fibers.overrides.emplace(MultiIndex{k}, fiber_dims[k]);
  }
  std::mt19937_64 rng(seed);
  return Family(TruncationBox(1, cap), fibers, [&](std::size_t, const MultiIndex& alpha) {
    return random_gaussian(fiber_dims[alpha[0] + 1], fiber_dims[alpha[0]], rng);
  });
}

Family conjugate(const Family& fam, const MatrixXcd& v) {
  if (!fam.layout().constant_dim() || *fam.layout().constant_dim() != v.rows()) {
    throw ShapeError("conjugation needs constant fibers matching the unitary");
  }
  const MatrixXcd vs = v.adjoint();
  return Family(fam.box(), fam.fibers(), [&](std::size_t j, const MultiIndex& alpha) {
    return (v * fam.weight(j, alpha) * vs).eval();
  });
}

Classification classify(const ScalarPhiSpec& spec, int cap, double tol) {
  const Family fam = generate(spec, cap);
  const auto& box = fam.box();
  Classification out;
  out.joint_contraction.extreme = 0.0;
  out.row_contraction.extreme = 0.0;
  out.joint_expansion.extreme = std::numeric_limits<double>::infinity();

  for (std::size_t r = 0; r < fam.stored_count(); ++r) {
    const MultiIndex& alpha = box.unrank(r);
    const MatrixXcd phi = spec.phi(alpha.order());
    const double nw = norm_w(spec, alpha);
    MatrixXcd sum = MatrixXcd::Zero(phi.cols(), phi.cols());
    for (std::size_t j = 0; j < fam.dim(); ++j) sum += fam.weight(j, r).adjoint() * fam.weight(j, r);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(linalg::hermitian_part(sum));
    const auto& ev = es.eigenvalues();

    const double joint_norm = nw * linalg::op_norm(phi);
    const double joint_direct = std::sqrt(std::max(0.0, ev(ev.size() - 1)));
    record(out.joint_contraction, alpha, joint_norm, joint_direct, joint_norm <= 1.0 + tol,
           joint_direct <= 1.0 + tol);
    out.joint_contraction.extreme = std::max(out.joint_contraction.extreme, joint_norm);

    const double exp_norm = nw * linalg::sigma_min(phi);
    const double exp_direct = std::sqrt(std::max(0.0, ev(0)));
    record(out.joint_expansion, alpha, exp_norm, exp_direct, exp_norm >= 1.0 - tol,
           exp_direct >= 1.0 - tol);
    out.joint_expansion.extreme = std::min(out.joint_expansion.extreme, exp_norm);
  }

  for (const auto& alpha : box) {
    if (alpha.is_zero()) continue;
    const MatrixXcd phi = spec.phi(alpha.order() - 1);
    MatrixXcd sum = MatrixXcd::Zero(phi.rows(), phi.rows());
    for (std::size_t j = 0; j < fam.dim(); ++j) {
      if (auto prev = sub_unit(alpha, j)) {
        const auto& a = fam.weight(j, *prev);
        sum += a * a.adjoint();
      }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(linalg::hermitian_part(sum));
    const double row_norm = norm_w_tilde(spec, alpha) * linalg::op_norm(phi);
    const double row_direct =
        std::sqrt(std::max(0.0, es.eigenvalues()(es.eigenvalues().size() - 1)));
    record(out.row_contraction, alpha, row_norm, row_direct, row_norm <= 1.0 + tol,
           row_direct <= 1.0 + tol);
    out.row_contraction.extreme = std::max(out.row_contraction.extreme, row_norm);
  }
  return out;
}

}  // namespace opshift
