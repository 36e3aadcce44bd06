#pragma once

#include <random>
#include <vector>

#include "opshift/factory.hpp"
#include "opshift/shift_engine.hpp"

namespace opshift::oracle {

/// T^beta by composing apply_T beta_j times per axis.
inline TruncatedVector<cd> composed_power(const Family& fam, const MultiIndex& beta,
                                          TruncatedVector<cd> x) {
  for (std::size_t j = 0; j < fam.dim(); ++j) {
    for (int k = 0; k < beta[j]; ++k) x = apply_T(fam, j, x);
  }
  return x;
}

inline TruncatedVector<cd> composed_adjoint_power(const Family& fam, const MultiIndex& beta,
                                                  TruncatedVector<cd> x) {
  for (std::size_t j = 0; j < fam.dim(); ++j) {
    for (int k = 0; k < beta[j]; ++k) x = apply_T_adjoint(fam, j, x);
  }
  return x;
}

inline TruncatedVector<cd> random_vector(const Family& fam, std::mt19937_64& rng) {
  return TruncatedVector<cd>(fam.layout_ptr(),
                             random_gaussian(fam.layout().total(), 1, rng).col(0));
}

inline MatrixXcd matrix_power(const MatrixXcd& m, int k) {
  MatrixXcd p = MatrixXcd::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) p = (m * p).eval();
  return p;
}

struct BranchingExample {
  Family family;
  std::vector<MatrixXcd> bases;
  std::vector<std::vector<std::vector<int>>> partitions;
  std::vector<std::vector<cd>> coeff;  // by level, by child index
};

// Two roots; level sizes 2, 3, 5; one leaf at level 1. A_n is assembled from
// the child sets in random orthonormal bases.
inline BranchingExample branching_example(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  BranchingExample ex{Family::zeros(TruncationBox(1, 1), FiberMap(1)), {}, {}, {}};
  const std::vector<int> dims{2, 3, 5};
  for (int n : dims) ex.bases.push_back(random_unitary(n, rng));
  ex.partitions = {{{0, 1}, {2}}, {{0, 1}, {}, {2, 3, 4}}};
  std::uniform_real_distribution<double> u(0.5, 2.0);
  ex.coeff = {{}, {}, {}};
  for (int n = 1; n <= 2; ++n) {
    for (int y = 0; y < dims[n]; ++y) ex.coeff[n].push_back(std::polar(u(rng), u(rng)));
  }
  FiberMap fibers(2);
  fibers.overrides[MultiIndex{1}] = 3;
  fibers.overrides[MultiIndex{2}] = 5;
  ex.family = Family(TruncationBox(1, 2), fibers, [&](std::size_t, const MultiIndex& a) {
    const int n = a[0];
    MatrixXcd m = MatrixXcd::Zero(dims[n + 1], dims[n]);
    for (int x = 0; x < dims[n]; ++x) {
      for (int y : ex.partitions[n][x]) {
        m += ex.coeff[n + 1][y] * ex.bases[n + 1].col(y) * ex.bases[n].col(x).adjoint();
      }
    }
    return m;
  });
  return ex;
}

}  // namespace opshift::oracle
