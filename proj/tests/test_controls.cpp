// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "levycouple/controls.hpp"
#include "levycouple/error.hpp"
#include "test_support.hpp"

using namespace levycouple;
using namespace levycouple::testing;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Io;
}

// Summaries with V = 1 and the given nu, Z and W.
Summaries summaries_at(const Vector& nu, const AntisymmetricMatrix& z, double w) {
  return summarize(state_from(nu, 1.0, z, w));
}

}  // namespace

TEST(Reflection, MatrixAndParts) {
  const Vector nu{1.0, 0.0};
  const auto c = reflection_control(nu);
  EXPECT_EQ(c.j_mat(0, 0), -1.0);
  EXPECT_EQ(c.j_mat(1, 1), 1.0);
  EXPECT_EQ(c.j_mat(0, 1), 0.0);
  EXPECT_FALSE(c.has_complement);
  EXPECT_TRUE(c.skew_part.is_zero());
  EXPECT_EQ(complement_residual(c), 0.0);
}

TEST(Reflection, RejectsNonUnit) {
  EXPECT_EQ(code_of([] { reflection_control(Vector{1.0, 1.0}); }), ErrorCode::NotUnitVector);
}

TEST(Synchronous, IsIdentityWithZeroDeviation) {
  const auto c = synchronous_control(4);
  EXPECT_EQ(max_abs_diff(c.j_mat, Matrix::identity(4)), 0.0);
  EXPECT_EQ(frobenius_norm(c.deviation), 0.0);
  EXPECT_FALSE(c.has_complement);
}

TEST(Rotation, OrthogonalWithSkewPart) {
  Rng rng(3);
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto gen = random_generator(n, rng);
    const auto c = rotation_control(0.7, gen);
    EXPECT_LT(complement_residual(c), 1e-13);
    EXPECT_FALSE(c.has_complement);
    // skew part of exp(theta J) is sinh(theta J) = theta J + O(theta^3)
    const auto small = rotation_control(1e-8, gen);
    for (std::size_t k = 0; k < gen.upper().size(); ++k)
      EXPECT_NEAR(small.skew_part.upper()[k], 1e-8 * gen.upper()[k], 1e-22);
  }
  EXPECT_EQ(code_of([] {
              AntisymmetricMatrix g(3);
              g.set(0, 1, 1.0);
              rotation_control(0.1, g);
            }),
            ErrorCode::NotNormalizedGenerator);
}

TEST(RotatedReflection, MatchesProductOfFactors) {
  Rng rng(8);
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto nu = random_unit(n, rng);
    const auto gen = random_generator(n, rng);
    const double theta = 1.3;
    const auto c = rotated_reflection_control(nu, theta, gen);
    const Matrix expected = reflection_control(nu).j_mat * antisym_exp(theta, gen);
    EXPECT_LT(max_abs_diff(c.j_mat, expected), 1e-14);
    EXPECT_LT(complement_residual(c), 1e-13);
    EXPECT_NEAR(determinant(c.j_mat), -1.0, 1e-12);
  }
}

TEST(Mixture, EndpointsAreThePureControls) {
  Rng rng(12);
  const auto nu = random_unit(4, rng);
  const auto gen = random_generator(4, rng);
  const auto refl = reflection_rotation_mixture(nu, 1.0, 0.4, gen);
  EXPECT_LT(max_abs_diff(refl.j_mat, reflection_control(nu).j_mat), 1e-15);
  EXPECT_FALSE(refl.has_complement);
  const auto rot = reflection_rotation_mixture(nu, 0.0, 0.4, gen);
  EXPECT_LT(max_abs_diff(rot.j_mat, rotation_control(0.4, gen).j_mat), 1e-15);
  EXPECT_FALSE(rot.has_complement);
}

TEST(Mixture, ComplementRestoresAdmissibility) {
  Rng rng(13);
  for (std::size_t n = 2; n <= 7; ++n) {
    for (int rep = 0; rep < 50; ++rep) {
      const auto nu = random_unit(n, rng);
      const auto gen = random_generator(n, rng);
      const double w = rng.uniform();
      const double theta = 6.0 * (2.0 * rng.uniform() - 1.0);
      const auto c = reflection_rotation_mixture(nu, w, theta, gen);
      EXPECT_LT(complement_residual(c), 1e-10);
      // the complement is symmetric positive semi-definite
      EXPECT_LT(max_abs_diff(c.j_tilde, c.j_tilde.transpose()), 1e-14);
    }
  }
}

TEST(Mixture, GapIsAccurateNearIdentity) {
  // Weight 1e-6 on the reflection and a rotation angle of 1e-4: I - J^T J is
  // of order 1e-6 and must still be positive semi-definite.
  Rng rng(21);
  const auto nu = random_unit(3, rng);
  const auto gen = random_generator(3, rng);
  const auto c = reflection_rotation_mixture(nu, 1e-6, 1e-4, gen);
  EXPECT_TRUE(c.has_complement);
  const EigenRange r = check_admissible(c.j_mat);
  EXPECT_LE(r.max_eigenvalue, 1.0 + 1e-12);
  EXPECT_LT(complement_residual(c), 1e-12);
}

TEST(GeneralControl, RandomContractionsAreAdmissible) {
  Rng rng(17);
  for (std::size_t n = 2; n <= 5; ++n) {
    for (int rep = 0; rep < 40; ++rep) {
      const auto c = random_admissible_control(n, rng);
      EXPECT_LT(complement_residual(c), 1e-10);
      EXPECT_TRUE(check_admissible(c.j_mat).admissible);
    }
  }
  EXPECT_EQ(code_of([] { general_control(Matrix::identity(2) * 1.5); }), ErrorCode::NotPSD);
}

TEST(MixedCoefficients, ThreeDimensionalKernelConfiguration) {
  // nu in the kernel of Z: |Z nu|^2 = 0, so gamma = 2 (0.6 + 2) = 5.2,
  // delta = 2 (0.5 + 5.2^2 / 8) = 7.76 = delta0 = 2 (0.5) + 2.6^2.
  AntisymmetricMatrix z(3);
  z.set(0, 1, 1.0 / std::sqrt(2.0));
  const auto s = summaries_at({0.0, 0.0, 1.0}, z, 10.0);
  const auto c = mixed_coefficients(s, 0.5, 0.6);
  EXPECT_NEAR(c.z_nu_sq, 0.0, 1e-15);
  EXPECT_NEAR(c.gamma, 5.2, 1e-14);
  EXPECT_NEAR(c.delta, 7.76, 1e-13);
  EXPECT_NEAR(c.delta0, 7.76, 1e-13);
  EXPECT_NEAR(c.weight, 0.0776, 1e-15);
  EXPECT_NEAR(c.theta, 0.52, 1e-15);
}

TEST(MixedCoefficients, PlaneOfZ) {
  // nu in the plane of Z: |Z nu|^2 = 1/2, gamma = 2 (0.6 + 2 - 2) = 1.2,
  // delta = 2 mu_K exactly.
  AntisymmetricMatrix z(3);
  z.set(0, 1, 1.0 / std::sqrt(2.0));
  const auto c = mixed_coefficients(summaries_at({1.0, 0.0, 0.0}, z, 10.0), 0.5, 0.6);
  EXPECT_NEAR(c.z_nu_sq, 0.5, 1e-15);
  EXPECT_NEAR(c.gamma, 1.2, 1e-14);
  EXPECT_NEAR(c.delta, 1.0, 1e-14);
}

TEST(MixedCoefficients, DeltaMinusTwoMuKNonNegative) {
  Rng rng(31);
  for (std::size_t n = 2; n <= 8; ++n)
    for (int rep = 0; rep < 200; ++rep) {
      const auto s = summarize(random_state(n, rng, 10.0, 100.0));
      const double mu_k = 0.1 + rng.uniform();
      const auto c = mixed_coefficients(s, mu_k, 1.5 * mu_k);
      EXPECT_GE(c.delta - 2.0 * mu_k, -1e-12);
      if (n >= 3) EXPECT_GE(c.gamma - 2.0 * 1.5 * mu_k, -1e-12);
    }
}

TEST(MixedControl, ThresholdAndDegenerateInputs) {
  AntisymmetricMatrix z(3);
  z.set(0, 1, 1.0 / std::sqrt(2.0));
  // delta0 = 7.76, so W = 2.7 (W^2 = 7.29) is below and W = 2.8 above.
  EXPECT_EQ(code_of([&] { mixed_control(summaries_at({0, 0, 1}, z, 2.7), 0.5, 0.6); }),
            ErrorCode::BelowThreshold);
  EXPECT_NO_THROW(mixed_control(summaries_at({0, 0, 1}, z, 2.8), 0.5, 0.6));
  const auto flat = summarize(state_from({0, 0, 1}, 1.0, AntisymmetricMatrix(3), 0.0));
  EXPECT_EQ(code_of([&] { mixed_control(flat, 0.5, 0.6); }), ErrorCode::DegenerateSummaries);
}

TEST(MixedControl, IsTheDocumentedMixture) {
  Rng rng(41);
  const auto s = summarize(random_state(4, rng, 30.0, 40.0));
  const auto c = mixed_coefficients(s, 0.5, 0.6);
  const auto ctrl = mixed_control(s, 0.5, 0.6);
  const Matrix expected =
      reflection_control(*s.nu).j_mat * c.weight + rotation_control(c.theta, *s.z_mat).j_mat * (1.0 - c.weight);
  EXPECT_LT(max_abs_diff(ctrl.j_mat, expected), 1e-15);
  EXPECT_LT(complement_residual(ctrl), 1e-10);
}

TEST(ControlKind, NamesRoundTrip) {
  for (auto k : {ControlKind::Reflection, ControlKind::Synchronous, ControlKind::Rotation,
                 ControlKind::RotatedReflection, ControlKind::Mixed})
    EXPECT_EQ(parse_control_kind(to_string(k)), k);
  EXPECT_FALSE(parse_control_kind("maximal"));
}
