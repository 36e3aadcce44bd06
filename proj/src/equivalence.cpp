#include "opshift/equivalence.hpp"

#include <random>

#include "opshift/errors.hpp"

namespace opshift {

namespace {

void check_same_shape(const GramFamily& g, const GramFamily& gt) {
  if (g.box().dim() != gt.box().dim()) throw ProblemError("families have different d");
  if (g.box().cap() != gt.box().cap()) throw ProblemError("families live on different boxes");
  if (g.fiber_dim() != gt.fiber_dim()) throw ProblemError("families have different fiber dimensions");
}

}  // namespace

SpectraCheck spectra_precheck(const GramFamily& g, const GramFamily& gt, double rel_tol) {
  check_same_shape(g, gt);
  SpectraCheck out;
  for (std::size_t r = 0; r < g.box().size(); ++r) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> ea(g.g(r), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eb(gt.g(r), Eigen::EigenvaluesOnly);
    const double scale = std::max(ea.eigenvalues().maxCoeff(), eb.eigenvalues().maxCoeff());
    const double gap = (ea.eigenvalues() - eb.eigenvalues()).cwiseAbs().maxCoeff() / scale;
    out.worst = std::max(out.worst, gap);
    if (gap > rel_tol && out.pass) {
      out.pass = false;
      out.witness = g.box().unrank(r);
    }
  }
  return out;
}

std::vector<MatrixXcd> solve_intertwiner(const GramFamily& g, const GramFamily& gt, double rel_tol) {
  check_same_shape(g, gt);
  const Eigen::Index n = g.fiber_dim();
  const Eigen::Index n2 = n * n;
  const MatrixXcd id = MatrixXcd::Identity(n, n);
  MatrixXcd system(static_cast<Eigen::Index>(g.box().size()) * n2, n2);
  for (std::size_t r = 0; r < g.box().size(); ++r) {
    const MatrixXcd& a = g.g(r);
    const MatrixXcd& b = gt.g(r);
    MatrixXcd block(n2, n2);
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = 0; q < n; ++q) {
        block.block(p * n, q * n, n, n) = a(q, p) * id - (p == q ? b : MatrixXcd::Zero(n, n));
      }
    }
    const double scale = linalg::op_norm(a) + linalg::op_norm(b);
    system.middleRows(static_cast<Eigen::Index>(r) * n2, n2) = block / scale;
  }
  const MatrixXcd null = linalg::nullspace(system, rel_tol);
  std::vector<MatrixXcd> basis;
  for (Eigen::Index c = 0; c < null.cols(); ++c) {
    basis.push_back(Eigen::Map<const MatrixXcd>(null.col(c).data(), n, n));
  }
  return basis;
}

double intertwining_residual(const GramFamily& g, const GramFamily& gt, const MatrixXcd& u) {
  double worst = 0.0;
  for (std::size_t r = 0; r < g.box().size(); ++r) {
    worst = std::max(worst, linalg::op_norm(u * g.g(r) - gt.g(r) * u) / linalg::op_norm(g.g(r)));
  }
  return worst;
}

double unitarity_residual(const MatrixXcd& u) {
  return linalg::op_norm(u.adjoint() * u - MatrixXcd::Identity(u.cols(), u.cols()));
}

UnitarySearch find_unitary(const GramFamily& g, const GramFamily& gt,
                           const std::vector<MatrixXcd>& basis, const SearchOptions& options) {
  UnitarySearch out;
  if (basis.empty()) return out;
  auto try_candidate = [&](const MatrixXcd& x) {
    ++out.attempts;
    const auto pol = linalg::polar(x);
    const auto& s = pol.singular_values;
    if (s(0) == 0.0 || s(s.size() - 1) < options.invert_tol * s(0)) return false;
    const double ures = unitarity_residual(pol.unitary);
    const double ires = intertwining_residual(g, gt, pol.unitary);
    if (ures > options.unitary_tol || ires > options.intertwine_tol) return false;
    out.u = pol.unitary;
    out.unitarity_residual = ures;
    out.intertwining_residual = ires;
    return true;
  };
  for (const auto& x : basis) {
    if (try_candidate(x)) return out;
  }
  for (int k = 0; k < options.budget; ++k) {
    std::seed_seq seq{options.seed, static_cast<std::uint64_t>(k)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    MatrixXcd x = MatrixXcd::Zero(basis.front().rows(), basis.front().cols());
    for (const auto& b : basis) x += normal(rng) * b;
    if (try_candidate(x)) return out;
  }
  return out;
}

ShiftIntertwining verify_intertwine(const Family& a, const GramFamily& ga, const Family& b,
                                    const GramFamily& gb, const MatrixXcd& u, double tol) {
  if (!ga.has_factors() || !gb.has_factors()) throw DomainError("verification needs the factors B_alpha");
  const auto& lay = a.layout();
  ShiftIntertwining out;
  MatrixXcd w = MatrixXcd::Zero(lay.total(), lay.total());
  for (std::size_t r = 0; r < a.box().size(); ++r) {
    const MatrixXcd wr = gb.factor(r) * u * ga.factor_inv(r);
    out.block_unitarity = std::max(out.block_unitarity, unitarity_residual(wr));
    w.block(lay.offset(r), lay.offset(r), lay.dim(r), lay.dim(r)) = wr;
  }
  for (std::size_t j = 0; j < a.dim(); ++j) {
    const MatrixXcd t = assemble_matrix(a, j);
    const MatrixXcd tt = assemble_matrix(b, j);
    out.shift_residual = std::max(
        out.shift_residual, linalg::op_norm(w * t - tt * w) / std::max(1.0, linalg::op_norm(t)));
  }
  out.pass = out.block_unitarity <= tol && out.shift_residual <= tol;
  return out;
}

std::string to_string(EquivalenceStatus s) {
  switch (s) {
    case EquivalenceStatus::equivalent: return "equivalent";
    case EquivalenceStatus::not_equivalent: return "not_equivalent";
    case EquivalenceStatus::no_unitary_found: return "no_unitary_found";
  }
  return "unknown";
}

EquivalenceVerdict decide_gram(const GramFamily& g, const GramFamily& gt,
                               const DecideOptions& options) {
  EquivalenceVerdict v;
  v.assumptions.push_back("the bpe sets of both families have non-empty interior (not verified)");
  const auto pre = spectra_precheck(g, gt);
  v.spectral_gap = pre.worst;
  if (!pre.pass) {
    v.status = EquivalenceStatus::not_equivalent;
    v.witness = pre.witness;
    return v;
  }
  const auto basis = solve_intertwiner(g, gt);
  v.nullspace_dim = static_cast<Eigen::Index>(basis.size());
  const auto search = find_unitary(g, gt, basis, options.search);
  v.attempts = search.attempts;
  if (!search.u) return v;
  v.status = EquivalenceStatus::equivalent;
  v.u = search.u;
  v.unitarity_residual = search.unitarity_residual;
  v.intertwining_residual = search.intertwining_residual;
  return v;
}

EquivalenceVerdict decide(const Family& a, const Family& b, const DecideOptions& options) {
  if (a.dim() != b.dim()) throw ProblemError("families have different d");
  if (a.cap() != b.cap()) throw ProblemError("families live on different boxes");
  const auto na = a.layout().constant_dim();
  const auto nb = b.layout().constant_dim();
  if (!na || !nb) throw ProblemError("fiber dimensions must be constant");
  if (*na != *nb) throw ProblemError("families have different fiber dimensions");
  for (const Family* f : {&a, &b}) {
    const auto inv = check_invertible(*f, options.tol_invert);
    if (!inv.invertible) {
      throw ProblemError("weight (j=" + std::to_string(inv.witness->axis + 1) + ", alpha=" +
                         inv.witness->alpha.to_string() + ") is not invertible");
    }
    const auto com = check_commuting(*f, options.tol_commuting);
    if (!com.commuting) {
      throw ProblemError("family does not commute at alpha=" + com.witness->alpha.to_string());
    }
  }
  const auto ga = build_gram(a, options.tol_invert);
  const auto gb = build_gram(b, options.tol_invert);
  auto v = decide_gram(ga, gb, options);
  if (v.u && options.verify_intertwine) v.shift_check = verify_intertwine(a, ga, b, gb, *v.u);
  return v;
}

}  // namespace opshift
