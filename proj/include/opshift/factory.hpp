#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "opshift/weight_family.hpp"

namespace opshift {

/// Scalar weights w^{(j)}_alpha together with a matrix profile Phi(n); the
/// generated weights are A^{(j)}_alpha = w^{(j)}_alpha Phi(|alpha|).
struct ScalarPhiSpec {
  std::size_t d = 1;
  std::function<cd(std::size_t axis, const MultiIndex& alpha)> w;
  std::function<MatrixXcd(int n)> phi;
};

/// Throws SpecError when the scalar weights fail
/// w^{(j)}_{alpha+e_i} w^{(i)}_alpha = w^{(i)}_{alpha+e_j} w^{(j)}_alpha.
Family generate(const ScalarPhiSpec& spec, int cap, double tol = 1e-12);

/// Scalar weights times the identity on C^n.
Family classical(std::size_t d, int cap, const std::function<cd(std::size_t, const MultiIndex&)>& w,
                 int n = 1);

ScalarPhiSpec example33_spec(std::size_t d);
Family example33(std::size_t d, int cap);

/// Constant weight diag(a, b) on C^2 along every axis.
Family diag_powers(std::size_t d, int cap, cd a, cd b);

/// Constant diagonal weight diag(values) along every axis.
Family diagonal_family(std::size_t d, int cap, const std::vector<cd>& values);

enum class Remark34Convention { as_printed, model };

struct Remark34 {
  /// P_alpha = sqrt(|alpha|!/alpha!) [[|alpha|+1, 1], [1, |alpha|+1]]^{1/2}, P_0 = I, by rank.
  std::vector<MatrixXcd> b;
  Family family;
};

/// as_printed: A^{(j)}_alpha = P_alpha P_{alpha+e_j}^{-1}.
/// model:      A^{(j)}_alpha = P_{alpha+e_j} P_alpha^{-1}.
Remark34 remark34(std::size_t d, int cap, Remark34Convention convention);

/// The 2x2 closed form of P_alpha.
MatrixXcd remark34_closed_form(const MultiIndex& alpha);

/// Commuting family with invertible weights A^{(j)}_alpha = B_{alpha+e_j} B_alpha^{-1}
/// for random invertible B_alpha near the identity and B_0 = I.
Family random_commuting_family(std::size_t d, int n, int cap, std::uint64_t seed,
                               double spread = 0.35);

/// Same construction with caller-supplied factors B_alpha (by rank, B_0 = I).
Family family_from_factors(const TruncationBox& box, const std::vector<MatrixXcd>& b);

/// d = 1 family with arbitrary random weights between fibers of the given sizes
/// (every d = 1 family commutes).
Family random_unilateral(const std::vector<int>& fiber_dims, std::uint64_t seed);

MatrixXcd random_gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);
MatrixXcd random_unitary(Eigen::Index n, std::mt19937_64& rng);

/// A~^{(j)}_alpha = V A^{(j)}_alpha V^* for a constant-fiber family.
Family conjugate(const Family& fam, const MatrixXcd& v);

struct Violation {
  MultiIndex alpha;
  double value = 0.0;
};

struct ClassCheck {
  bool holds = true;
  /// Norm-product path and direct operator inequality give the same verdict
  /// and the same value at every alpha.
  bool paths_agree = true;
  /// Extreme value over the box (max for contractions, min for expansion).
  double extreme = 0.0;
  std::vector<Violation> violations;
};

struct Classification {
  ClassCheck joint_contraction;
  ClassCheck row_contraction;
  ClassCheck joint_expansion;
};

/// Evaluates joint contraction, row contraction and joint expansion for the
/// family generated from `spec` on the box of cap `cap`, both through the
/// norm products ||w_alpha|| ||Phi(|alpha|)|| and through the operator sums.
Classification classify(const ScalarPhiSpec& spec, int cap, double tol = 1e-12);

}  // namespace opshift
