#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opshift/analytic_model.hpp"

namespace opshift {

struct SpectraCheck {
  bool pass = true;
  /// First alpha (block order) whose sorted spectra differ.
  std::optional<MultiIndex> witness;
  /// Largest eigenvalue gap relative to max(||G_alpha||, ||G~_alpha||).
  double worst = 0.0;
};

/// Compares sorted eigenvalues of G_alpha and G~_alpha for every alpha.
SpectraCheck spectra_precheck(const GramFamily& g, const GramFamily& gt, double rel_tol = 1e-8);

/// Orthonormal basis (in the trace inner product) of {X : X G_alpha = G~_alpha X for all alpha}.
std::vector<MatrixXcd> solve_intertwiner(const GramFamily& g, const GramFamily& gt,
                                         double rel_tol = 1e-10);

/// max_alpha ||U G_alpha - G~_alpha U|| / ||G_alpha||.
double intertwining_residual(const GramFamily& g, const GramFamily& gt, const MatrixXcd& u);

/// ||U^* U - I||.
double unitarity_residual(const MatrixXcd& u);

struct UnitarySearch {
  std::optional<MatrixXcd> u;
  double unitarity_residual = 0.0;
  double intertwining_residual = 0.0;
  /// Candidates examined, accepted one included.
  int attempts = 0;
};

struct SearchOptions {
  int budget = 200;
  std::uint64_t seed = 42;
  double invert_tol = 1e-8;
  double unitary_tol = 1e-10;
  double intertwine_tol = 1e-9;
};

/// Tries every basis element, then `budget` real Gaussian combinations. Each
/// candidate's polar factor is accepted only after direct residual checks.
UnitarySearch find_unitary(const GramFamily& g, const GramFamily& gt,
                           const std::vector<MatrixXcd>& basis, const SearchOptions& options = {});

struct ShiftIntertwining {
  /// max_alpha ||W_alpha^* W_alpha - I|| for W_alpha = B~_alpha U B_alpha^{-1}.
  double block_unitarity = 0.0;
  /// max_j ||W T_j - T~_j W|| / max(1, ||T_j||).
  double shift_residual = 0.0;
  bool pass = false;
};

/// Checks that W = sum_alpha B~_alpha U B_alpha^{-1} is unitary and carries T to T~.
ShiftIntertwining verify_intertwine(const Family& a, const GramFamily& ga, const Family& b,
                                    const GramFamily& gb, const MatrixXcd& u, double tol = 1e-8);

enum class EquivalenceStatus { equivalent, not_equivalent, no_unitary_found };
std::string to_string(EquivalenceStatus s);

struct EquivalenceVerdict {
  EquivalenceStatus status = EquivalenceStatus::no_unitary_found;
  std::optional<MatrixXcd> u;
  double unitarity_residual = 0.0;
  double intertwining_residual = 0.0;
  /// Spectral witness for not_equivalent.
  std::optional<MultiIndex> witness;
  double spectral_gap = 0.0;
  Eigen::Index nullspace_dim = 0;
  int attempts = 0;
  std::optional<ShiftIntertwining> shift_check;
  /// Hypotheses taken for granted rather than checked.
  std::vector<std::string> assumptions;
};

struct DecideOptions {
  SearchOptions search;
  bool verify_intertwine = false;
  double tol_commuting = 1e-10;
  double tol_invert = 1e-12;
};

/// precheck -> intertwiner nullspace -> unitary search on two Gram families.
EquivalenceVerdict decide_gram(const GramFamily& g, const GramFamily& gt,
                               const DecideOptions& options = {});

/// Full pipeline on weight families. Throws ProblemError on mismatched d, box or
/// fiber dimension, and on weights that are not invertible or do not commute.
EquivalenceVerdict decide(const Family& a, const Family& b, const DecideOptions& options = {});

}  // namespace opshift
