#include <gtest/gtest.h>

#include "opshift/errors.hpp"
#include "opshift/factory.hpp"
#include "opshift/json_io.hpp"
#include "opshift/shift_engine.hpp"

using namespace opshift;

namespace {

MatrixXcd printed_a0() {
  const double s = std::sqrt(3.0);
  MatrixXcd m(2, 2);
  m << s + 1, 1 - s, 1 - s, s + 1;
  return m / (2.0 * s);
}

// The displayed matrix for alpha != 0, written out entry by entry.
MatrixXcd printed_a(std::size_t j, const MultiIndex& a) {
  const double n = a.order();
  const double p = std::sqrt((n + 2) / (n + 3)), q = std::sqrt(n / (n + 1));
  const double c = 0.5 * std::sqrt((a[j] + 1.0) / (n + 1));
  MatrixXcd m(2, 2);
  m << c * (p + q), c * (p - q), c * (p - q), c * (p + q);
  return m;
}

}  // namespace

TEST(Generate, UnitWeightsGiveIdentityFamily) {
  ScalarPhiSpec spec{3, [](std::size_t, const MultiIndex&) { return cd(1.0); },
                     [](int) { return MatrixXcd::Identity(2, 2).eval(); }};
  const auto fam = generate(spec, 3);
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t r = 0; r < fam.stored_count(); ++r) {
      EXPECT_EQ(fam.weight(j, r), MatrixXcd::Identity(2, 2));
    }
  }
}

TEST(Generate, Example33MatchesPrintedMatrices) {
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto fam = example33(d, 4);
    for (std::size_t j = 0; j < d; ++j) {
      EXPECT_LE((fam.weight(j, MultiIndex::zero(d)) - printed_a0()).cwiseAbs().maxCoeff(), 1e-15);
      for (std::size_t r = 1; r < fam.stored_count(); ++r) {
        const auto& a = fam.box().unrank(r);
        EXPECT_LE((fam.weight(j, r) - printed_a(j, a)).cwiseAbs().maxCoeff(), 1e-15);
      }
    }
  }
}

TEST(Generate, Example33CommutesTightly) {
  EXPECT_LE(check_commuting(example33(2, 6)).worst_residual, 1e-12);
  EXPECT_LE(check_commuting(example33(3, 5)).worst_residual, 1e-12);
}

TEST(Generate, IncompatibleScalarsRejected) {
  ScalarPhiSpec spec{2, [](std::size_t j, const MultiIndex& a) { return cd(j == 0 ? 1.0 + a[1] : 1.0); },
                     [](int) { return MatrixXcd::Identity(1, 1).eval(); }};
  EXPECT_THROW(generate(spec, 3), SpecError);
}

TEST(Generate, SerializationRoundTrip) {
  const auto fam = example33(2, 3);
  const auto back = from_json(to_json(fam));
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t r = 0; r < fam.stored_count(); ++r) EXPECT_EQ(fam.weight(j, r), back.weight(j, r));
  }
}

TEST(Classify, Example33RowContractionEveryDimension) {
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto c = classify(example33_spec(d), 6);
    EXPECT_TRUE(c.row_contraction.holds) << "d=" << d;
    EXPECT_TRUE(c.row_contraction.paths_agree);
    EXPECT_TRUE(c.joint_contraction.paths_agree);
    EXPECT_TRUE(c.joint_expansion.paths_agree);
    EXPECT_EQ(c.joint_contraction.holds, d == 1) << "d=" << d;
  }
}

TEST(Classify, Example33JointWitness) {
  const auto c = classify(example33_spec(2), 6);
  const Violation* at_e1 = nullptr;
  for (const auto& v : c.joint_contraction.violations) {
    if (v.alpha == MultiIndex{1, 0}) at_e1 = &v;
  }
  ASSERT_NE(at_e1, nullptr);
  EXPECT_NEAR(at_e1->value, 3.0 / (2.0 * std::sqrt(2.0)), 1e-12);
  EXPECT_FALSE(c.joint_expansion.holds);
}

TEST(Classify, PathsAgreeOnOtherSpecs) {
  ScalarPhiSpec big{2, [](std::size_t, const MultiIndex&) { return cd(1.5); },
                    [](int n) { return (MatrixXcd::Identity(2, 2) * (1.0 + 0.1 * n)).eval(); }};
  const auto c = classify(big, 4);
  EXPECT_TRUE(c.joint_expansion.holds);
  EXPECT_TRUE(c.joint_expansion.paths_agree);
  EXPECT_FALSE(c.row_contraction.holds);
  EXPECT_TRUE(c.row_contraction.paths_agree);
}

TEST(DiagPowers, MomentsAreDiagonalPowers) {
  const auto fam = diag_powers(2, 4, 2.0, 0.5);
  for (const auto& a : fam.box()) {
    const MatrixXcd b = moment_diag(fam, a);
    EXPECT_NEAR(b(0, 0).real(), std::pow(2.0, a.order()), 1e-12);
    EXPECT_NEAR(b(1, 1).real(), std::pow(2.0, -a.order()), 1e-15);
  }
  const auto id = diag_powers(2, 2, 1.0, 1.0);
  for (std::size_t r = 0; r < id.stored_count(); ++r) EXPECT_EQ(id.weight(1, r), MatrixXcd::Identity(2, 2));
}

TEST(Remark34, FactorsAndPrintedWeights) {
  const auto r = remark34(2, 4, Remark34Convention::as_printed);
  EXPECT_EQ(r.b[0], MatrixXcd::Identity(2, 2));
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_LE((r.family.weight(j, MultiIndex{0, 0}) - printed_a0()).cwiseAbs().maxCoeff(), 1e-12);
  }
  for (std::size_t i = 0; i < r.b.size(); ++i) {
    EXPECT_LE((r.b[i] - remark34_closed_form(r.family.box().unrank(i))).cwiseAbs().maxCoeff(),
              1e-12 * std::max(1.0, r.b[i].norm()));
    for (std::size_t k = 0; k < r.b.size(); ++k) {
      EXPECT_LE(linalg::op_norm(r.b[i] * r.b[k] - r.b[k] * r.b[i]),
                1e-12 * std::max(1.0, (r.b[i] * r.b[k]).norm()));
    }
  }
}

TEST(Remark34, AsPrintedEqualsExample33) {
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto r = remark34(d, 5, Remark34Convention::as_printed);
    const auto ex = example33(d, 5);
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < ex.stored_count(); ++k) {
        EXPECT_LE((r.family.weight(j, k) - ex.weight(j, k)).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
  }
}

TEST(Remark34, BothConventionsCommute) {
  EXPECT_TRUE(check_commuting(remark34(2, 5, Remark34Convention::model).family).commuting);
  EXPECT_TRUE(check_commuting(remark34(2, 5, Remark34Convention::as_printed).family).commuting);
}

TEST(Random, UnitaryAndConjugation) {
  std::mt19937_64 rng(1);
  const MatrixXcd v = random_unitary(4, rng);
  EXPECT_LE(linalg::op_norm(v.adjoint() * v - MatrixXcd::Identity(4, 4)), 1e-14);
  const auto fam = random_commuting_family(2, 4, 3, 3);
  const auto conj = conjugate(fam, v);
  EXPECT_TRUE(check_commuting(conj).commuting);
  for (const auto& a : fam.box()) {
    const MatrixXcd expect = v * moment_diag(fam, a) * v.adjoint();
    EXPECT_LE(linalg::op_norm(moment_diag(conj, a) - expect), 1e-12 * std::max(1.0, expect.norm()));
  }
}

TEST(Random, FactorFamiliesAreDeterministicAndInvertible) {
  const auto a = random_commuting_family(2, 3, 4, 77);
  const auto b = random_commuting_family(2, 3, 4, 77);
  for (std::size_t r = 0; r < a.stored_count(); ++r) EXPECT_EQ(a.weight(0, r), b.weight(0, r));
  EXPECT_TRUE(check_invertible(a).invertible);
}
