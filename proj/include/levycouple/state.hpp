// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "levycouple/matrix.hpp"

namespace levycouple {

// State of a coupled pair (A, B) of n-dimensional Brownian motions together
// with the antisymmetric matrix of invariant area differences.
//
// The separation X = A - B is stored directly rather than recomputed from A
// and B, so a step whose increments agree exactly leaves X bit-identical and
// the small-separation regime keeps full relative precision.
struct CoupledState {
  std::size_t dim = 0;
  Vector b_path;     // current position of B
  Vector separation; // X = A - B
  AntisymmetricMatrix area_diff;
  double t_time = 0.0;
  double tau_time = 0.0;
  bool coupled_flag = false;

  static CoupledState from_positions(const Vector& a, const Vector& b, const AntisymmetricMatrix& area);

  Vector a_path() const;
};

// Derived quantities of a state. Members that are undefined for the state
// (V = 0 or U = 0) are left empty instead of being filled with NaN.
struct Summaries {
  std::size_t dim = 0;
  double v = 0.0;  // |A - B|
  double u = 0.0;  // area summary; signed in dimension 2, non-negative above
  std::optional<double> w;  // U / V^2
  std::optional<double> k;  // log V
  std::optional<double> h;  // log |U|
  std::optional<Vector> nu;                // (A - B) / V
  std::optional<AntisymmetricMatrix> z_mat;  // area_diff / U
};

Summaries summarize(const CoupledState& state);

// Signed in dimension two: sqrt(2) * area_12. Frobenius norm otherwise.
double area_summary(const AntisymmetricMatrix& area);

// Area-difference matrix of two polylines given as vertex lists, accumulating
//   int (A_i dA_j - A_j dA_i) - int (B_i dB_j - B_j dB_i) + A_i B_j - A_j B_i
// with trapezoid increments (exact for straight segments).
AntisymmetricMatrix invariant_area_matrix(const std::vector<Vector>& a_hist, const std::vector<Vector>& b_hist);

// Euler increment of the area matrix over one step:
//   X_i dY_j - X_j dY_i - 2 skew_ij dt, with X taken at the step start.
AntisymmetricMatrix area_increment(const CoupledState& state, std::span<const double> dy,
                                   const AntisymmetricMatrix& skew_part, double dt);

// Trajectory snapshot rows: t,tau,V,U,W and, when verbose, A_1..A_n,B_1..B_n.
std::string trajectory_csv_header(std::size_t dim, bool verbose);
std::string trajectory_csv_row(const CoupledState& state, const Summaries& summ, bool verbose);

}  // namespace levycouple
