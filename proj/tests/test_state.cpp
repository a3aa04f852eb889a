// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "levycouple/error.hpp"
#include "levycouple/state.hpp"
#include "test_support.hpp"

using namespace levycouple;

TEST(Area, UnitSquareAgainstShoelace) {
  // A runs once anticlockwise around the unit square; B stays at the origin.
  // Twice the enclosed area: int (x dy - y dx) = 2.
  const std::vector<Vector> a{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
  const std::vector<Vector> b(5, Vector{0, 0});
  const auto area = invariant_area_matrix(a, b);
  EXPECT_DOUBLE_EQ(area(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(area_summary(area), 2.0 * std::sqrt(2.0));
}

TEST(Area, ClockwiseTriangleIsNegative) {
  const std::vector<Vector> a{{0, 0}, {0, 2}, {3, 0}, {0, 0}};
  const std::vector<Vector> b(4, Vector{0, 0});
  EXPECT_DOUBLE_EQ(invariant_area_matrix(a, b)(0, 1), -6.0);  // twice the area 3
}

TEST(Area, EndpointTermForOpenPaths) {
  // Straight paths from the origin: the path integrals vanish and only A ^ B remains.
  const std::vector<Vector> a{{0, 0, 0}, {1, 0, 0}};
  const std::vector<Vector> b{{0, 0, 0}, {0, 1, 0}};
  const auto area = invariant_area_matrix(a, b);
  EXPECT_DOUBLE_EQ(area(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(area(0, 2), 0.0);
  EXPECT_DOUBLE_EQ(area(1, 2), 0.0);
}

namespace {

std::vector<Vector> random_polyline(std::size_t n, std::size_t k, Rng& rng, const Vector* start = nullptr) {
  std::vector<Vector> path;
  for (std::size_t m = 0; m < k; ++m) {
    Vector p(n);
    for (double& x : p) x = rng.gaussian();
    path.push_back(m == 0 && start ? *start : p);
  }
  return path;
}

}  // namespace

TEST(Area, TranslationShiftsByStartingChord) {
  // Shifting both paths by s adds s ^ (B0 - A0).
  Rng rng(4);
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto a = random_polyline(n, 30, rng);
    const auto b = random_polyline(n, 30, rng);
    Vector shift(n);
    for (double& s : shift) s = rng.gaussian();
    auto a2 = a, b2 = b;
    for (auto& p : a2)
      for (std::size_t i = 0; i < n; ++i) p[i] += shift[i];
    for (auto& p : b2)
      for (std::size_t i = 0; i < n; ++i) p[i] += shift[i];
    Vector chord(n);
    for (std::size_t i = 0; i < n; ++i) chord[i] = b[0][i] - a[0][i];
    const auto d = invariant_area_matrix(a2, b2) - invariant_area_matrix(a, b) - AntisymmetricMatrix::wedge(shift, chord);
    for (double x : d.upper()) EXPECT_NEAR(x, 0.0, 1e-11);
  }
}

TEST(Area, CommonStartLoopMatchesShoelace) {
  // With A0 = B0 the loop A-path, chord, reversed B-path is closed and the
  // area is twice its shoelace signed area.
  Rng rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    const auto a = random_polyline(2, 12, rng);
    const auto b = random_polyline(2, 12, rng, &a[0]);
    std::vector<Vector> loop(a.begin(), a.end());
    loop.insert(loop.end(), b.rbegin(), b.rend());
    double shoelace = 0.0;
    for (std::size_t k = 0; k + 1 < loop.size(); ++k)
      shoelace += 0.5 * (loop[k][0] * loop[k + 1][1] - loop[k][1] * loop[k + 1][0]);
    EXPECT_NEAR(invariant_area_matrix(a, b)(0, 1), 2.0 * shoelace, 1e-10);
  }
}

TEST(Area, SwappingPathsNegates) {
  Rng rng(10);
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto a = random_polyline(n, 20, rng);
    const auto b = random_polyline(n, 20, rng);
    const auto d = invariant_area_matrix(a, b) + invariant_area_matrix(b, a);
    for (double x : d.upper()) EXPECT_NEAR(x, 0.0, 1e-12);
  }
}

TEST(Area, Errors) {
  const std::vector<Vector> a{{0, 0}, {1, 0}};
  const std::vector<Vector> b{{0, 0}};
  try {
    invariant_area_matrix(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
  const std::vector<Vector> c{{0, 0}, {1, 0, 0}};
  try {
    invariant_area_matrix(c, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Summaries, PresentMembersAndValues) {
  AntisymmetricMatrix area(3);
  area.set(0, 1, 3.0);
  area.set(1, 2, 4.0);
  const auto s = summarize(CoupledState::from_positions({2, 0, 0}, {0, 0, 0}, area));
  EXPECT_DOUBLE_EQ(s.v, 2.0);
  EXPECT_DOUBLE_EQ(s.u, std::sqrt(2.0) * 5.0);
  ASSERT_TRUE(s.w && s.k && s.h && s.nu && s.z_mat);
  EXPECT_DOUBLE_EQ(*s.w, s.u / 4.0);
  EXPECT_DOUBLE_EQ(*s.k, std::log(2.0));
  EXPECT_NEAR(frobenius_norm(*s.z_mat), 1.0, 1e-15);
}

TEST(Summaries, DegenerateMembersAreAbsent) {
  const auto s = summarize(CoupledState::from_positions({1, 1}, {1, 1}, AntisymmetricMatrix(2)));
  EXPECT_EQ(s.v, 0.0);
  EXPECT_EQ(s.u, 0.0);
  EXPECT_FALSE(s.w || s.k || s.h || s.nu || s.z_mat);

  AntisymmetricMatrix area(2);
  area.set(0, 1, -1.0);
  const auto t = summarize(CoupledState::from_positions({1, 1}, {1, 1}, area));
  EXPECT_DOUBLE_EQ(t.u, -std::sqrt(2.0));  // signed in the plane
  EXPECT_FALSE(t.nu);
  EXPECT_TRUE(t.h && t.z_mat);
}

TEST(Summaries, AreaSummaryIsNonNegativeAboveThePlane) {
  AntisymmetricMatrix area(3);
  area.set(0, 1, -2.0);
  EXPECT_DOUBLE_EQ(area_summary(area), 2.0 * std::sqrt(2.0));
}

TEST(AreaIncrement, FormulaAndErrors) {
  AntisymmetricMatrix skew(2);
  skew.set(0, 1, 0.25);
  const auto st = CoupledState::from_positions({1.0, 0.5}, {0.0, 0.0}, AntisymmetricMatrix(2));
  const Vector dy{0.1, -0.2};
  const auto inc = area_increment(st, dy, skew, 0.01);
  EXPECT_DOUBLE_EQ(inc(0, 1), 1.0 * -0.2 - 0.5 * 0.1 - 2.0 * 0.25 * 0.01);
  EXPECT_THROW(area_increment(st, dy, skew, 0.0), Error);
  EXPECT_THROW(area_increment(st, Vector{1.0}, skew, 0.1), Error);
}

TEST(Trajectory, HeaderAndRow) {
  EXPECT_EQ(trajectory_csv_header(2, false), "t,tau,V,U,W");
  EXPECT_EQ(trajectory_csv_header(2, true), "t,tau,V,U,W,A1,A2,B1,B2");
  auto st = CoupledState::from_positions({1.0, 0.0}, {0.0, 0.0}, AntisymmetricMatrix(2));
  st.t_time = 0.5;
  EXPECT_EQ(trajectory_csv_row(st, summarize(st), false), "0.5,0,1,0,0");
  auto met = CoupledState::from_positions({0.0, 0.0}, {0.0, 0.0}, AntisymmetricMatrix(2));
  EXPECT_EQ(trajectory_csv_row(met, summarize(met), true), "0,0,0,0,,0,0,0,0");
}

TEST(State, ConstructionChecks) {
  EXPECT_THROW(CoupledState::from_positions({1.0}, {0.0}, AntisymmetricMatrix(1)), Error);
  EXPECT_THROW(CoupledState::from_positions({1.0, 0.0}, {0.0}, AntisymmetricMatrix(2)), Error);
  const auto s = CoupledState::from_positions({3.0, -1.0}, {1.0, 1.0}, AntisymmetricMatrix(2));
  EXPECT_EQ(s.separation, (Vector{2.0, -2.0}));
  EXPECT_EQ(s.a_path(), (Vector{3.0, -1.0}));
}
