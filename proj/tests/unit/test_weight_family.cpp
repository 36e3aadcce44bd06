#include <gtest/gtest.h>

#include "opshift/errors.hpp"
#include "opshift/factory.hpp"
#include "opshift/weight_family.hpp"

using namespace opshift;

namespace {

Family identity_family(std::size_t d, int cap, int n) {
  return Family(TruncationBox(d, cap), FiberMap(n), [n](std::size_t, const MultiIndex&) {
    return MatrixXcd::Identity(n, n).eval();
  });
}

}  // namespace

TEST(WeightFamily, StoresWeightsBelowTopLayer) {
  const auto fam = identity_family(2, 3, 2);
  EXPECT_EQ(fam.stored_count(), 6u);
  EXPECT_TRUE(fam.has_weight(MultiIndex{1, 1}));
  EXPECT_FALSE(fam.has_weight(MultiIndex{2, 1}));
  EXPECT_THROW(fam.weight(0, MultiIndex{3, 0}), DomainError);
}

TEST(WeightFamily, ShapeErrorNamesSite) {
  try {
    Family(TruncationBox(1, 2), FiberMap(2), [](std::size_t, const MultiIndex& a) {
      return a[0] == 1 ? MatrixXcd::Identity(3, 2).eval() : MatrixXcd::Identity(2, 2).eval();
    });
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("j=1, alpha=(1)"), std::string::npos) << e.what();
  }
}

TEST(WeightFamily, VaryingFibers) {
  FiberMap fibers(1);
  fibers.overrides[MultiIndex{1}] = 2;
  fibers.overrides[MultiIndex{2}] = 4;
  const Family fam(TruncationBox(1, 2), fibers, [&](std::size_t, const MultiIndex& a) {
    return MatrixXcd::Ones(fibers.dim(add_unit(a, 0)), fibers.dim(a)).eval();
  });
  EXPECT_EQ(fam.layout().total(), 7);
  EXPECT_EQ(fam.layout().offset(MultiIndex{2}), 3);
  EXPECT_FALSE(fam.layout().constant_dim().has_value());
  FiberMap bad(1);
  bad.overrides[MultiIndex{5}] = 2;
  EXPECT_THROW(FiberLayout(TruncationBox(1, 2), bad), BoxError);
}

TEST(CheckBounded, IdentityAndDiag) {
  for (double s : check_bounded(identity_family(3, 3, 2))) EXPECT_DOUBLE_EQ(s, 1.0);
  for (double s : check_bounded(diag_powers(2, 4, 2.0, 0.5))) EXPECT_DOUBLE_EQ(s, 2.0);
}

// Brute force: per-matrix singular values through an independent eigen-solve of A^* A.
TEST(CheckBounded, MatchesPerMatrixOracle) {
  const auto fam = random_commuting_family(2, 3, 4, 7);
  const auto s = check_bounded(fam);
  for (std::size_t j = 0; j < 2; ++j) {
    double best = 0.0;
    for (std::size_t r = 0; r < fam.stored_count(); ++r) {
      const MatrixXcd& a = fam.weight(j, r);
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a.adjoint() * a);
      best = std::max(best, std::sqrt(es.eigenvalues().maxCoeff()));
    }
    EXPECT_NEAR(s[j], best, 1e-12 * best);
  }
}

TEST(CheckCommuting, ScalarClassical) {
  // w^{(j)}_alpha = sqrt((alpha_j+1)/(|alpha|+1)) satisfies the scalar identity.
  const auto fam = classical(2, 5, [](std::size_t j, const MultiIndex& a) {
    return cd(std::sqrt((a[j] + 1.0) / (a.order() + 1.0)), 0.0);
  });
  EXPECT_TRUE(check_commuting(fam).commuting);
}

TEST(CheckCommuting, Example33) {
  const auto rep = check_commuting(example33(2, 6));
  EXPECT_TRUE(rep.commuting);
  EXPECT_LE(rep.worst_residual, 1e-12);
}

TEST(CheckCommuting, PerturbationDetectedAtOrigin) {
  const auto fam = example33(2, 4);
  MatrixXcd a = fam.weight(0, MultiIndex{0, 0});
  a(0, 1) += 1e-3;
  const auto bad = fam.with_weight(0, MultiIndex{0, 0}, a);
  const auto rep = check_commuting(bad);
  EXPECT_FALSE(rep.commuting);
  ASSERT_TRUE(rep.witness.has_value());
  EXPECT_EQ(rep.witness->alpha, (MultiIndex{0, 0}));
  EXPECT_EQ(rep.witness->i, 0u);
  EXPECT_EQ(rep.witness->j, 1u);
  // Direct recomputation of the residual.
  const MatrixXcd lhs = bad.weight(0, MultiIndex{0, 1}) * bad.weight(1, MultiIndex{0, 0});
  const MatrixXcd rhs = bad.weight(1, MultiIndex{1, 0}) * bad.weight(0, MultiIndex{0, 0});
  const double direct =
      linalg::op_norm(lhs - rhs) / std::max({1.0, linalg::op_norm(lhs), linalg::op_norm(rhs)});
  EXPECT_NEAR(rep.worst_residual, direct, 1e-15);
}

TEST(CheckCommuting, SymmetricInAxes) {
  const auto fam = random_commuting_family(3, 2, 3, 3).with_weight(
      1, MultiIndex{0, 0, 0}, MatrixXcd::Ones(2, 2));
  for (const auto& alpha : fam.box()) {
    if (alpha.order() > fam.cap() - 2) break;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_DOUBLE_EQ(commuting_residual(fam, alpha, i, j), commuting_residual(fam, alpha, j, i));
      }
    }
  }
}

TEST(CheckCommuting, RandomFactorFamiliesCommute) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EXPECT_TRUE(check_commuting(random_commuting_family(3, 3, 4, seed)).commuting);
  }
}

TEST(CheckInvertible, Cases) {
  EXPECT_TRUE(check_invertible(identity_family(2, 3, 2)).invertible);
  const auto ex = check_invertible(example33(2, 5));
  EXPECT_TRUE(ex.invertible);
  EXPECT_GT(ex.min_sigma, 0.1);
  MatrixXcd rank1(2, 2);
  rank1 << 1, 1, 1, 1;
  const auto bad = identity_family(2, 3, 2).with_weight(1, MultiIndex{1, 0}, rank1);
  const auto rep = check_invertible(bad);
  EXPECT_FALSE(rep.invertible);
  ASSERT_TRUE(rep.witness.has_value());
  EXPECT_EQ(rep.witness->axis, 1u);
  EXPECT_EQ(rep.witness->alpha, (MultiIndex{1, 0}));
}

TEST(CheckInvertible, NonSquareThrows) {
  EXPECT_THROW(check_invertible(random_unilateral({1, 2, 2}, 1)), NotSquareError);
}
