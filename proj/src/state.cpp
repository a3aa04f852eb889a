// SPDX-License-Identifier: Apache-2.0
#include "levycouple/state.hpp"

#include <cmath>
#include <cstdio>

#include "levycouple/error.hpp"

namespace levycouple {

namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

CoupledState CoupledState::from_positions(const Vector& a, const Vector& b, const AntisymmetricMatrix& area) {
  if (a.size() != b.size() || a.size() != area.dim())
    throw Error(ErrorCode::DimensionMismatch, "positions and area matrix must share a dimension");
  if (a.size() < 2) throw Error(ErrorCode::WrongDimension, "dimension must be at least 2");
  CoupledState s;
  s.dim = a.size();
  s.b_path = b;
  s.separation.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) s.separation[i] = a[i] - b[i];
  s.area_diff = area;
  return s;
}

Vector CoupledState::a_path() const {
  Vector a(dim);
  for (std::size_t i = 0; i < dim; ++i) a[i] = b_path[i] + separation[i];
  return a;
}

double area_summary(const AntisymmetricMatrix& area) {
  if (area.dim() == 2) return std::sqrt(2.0) * area(0, 1);
  return frobenius_norm(area);
}

Summaries summarize(const CoupledState& state) {
  Summaries s;
  s.dim = state.dim;
  s.v = norm(state.separation);
  s.u = area_summary(state.area_diff);
  if (s.v > 0.0) {
    s.w = s.u / (s.v * s.v);
    s.k = std::log(s.v);
    Vector nu(state.dim);
    for (std::size_t i = 0; i < state.dim; ++i) nu[i] = state.separation[i] / s.v;
    s.nu = std::move(nu);
  }
  if (s.u != 0.0) {
    s.h = std::log(std::abs(s.u));
    s.z_mat = state.area_diff * (1.0 / s.u);
  }
  return s;
}

AntisymmetricMatrix invariant_area_matrix(const std::vector<Vector>& a_hist, const std::vector<Vector>& b_hist) {
  if (a_hist.size() != b_hist.size()) throw Error(ErrorCode::LengthMismatch, "paths have different vertex counts");
  if (a_hist.empty()) throw Error(ErrorCode::LengthMismatch, "paths must have at least one vertex");
  const std::size_t n = a_hist.front().size();
  for (std::size_t k = 0; k < a_hist.size(); ++k)
    if (a_hist[k].size() != n || b_hist[k].size() != n)
      throw Error(ErrorCode::DimensionMismatch, "path vertices have inconsistent dimensions");

  AntisymmetricMatrix area(n);
  // A straight segment p -> q contributes (p_i + q_i)/2 (q_j - p_j) - (i <-> j) = p_i q_j - p_j q_i.
  for (std::size_t k = 1; k < a_hist.size(); ++k) {
    area += AntisymmetricMatrix::wedge(a_hist[k - 1], a_hist[k]);
    area -= AntisymmetricMatrix::wedge(b_hist[k - 1], b_hist[k]);
  }
  area += AntisymmetricMatrix::wedge(a_hist.back(), b_hist.back());
  return area;
}

AntisymmetricMatrix area_increment(const CoupledState& state, std::span<const double> dy,
                                   const AntisymmetricMatrix& skew_part, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::NonPositiveStep, "step must be positive");
  if (dy.size() != state.dim || skew_part.dim() != state.dim)
    throw Error(ErrorCode::DimensionMismatch, "increment dimension differs from state");
  AntisymmetricMatrix inc = AntisymmetricMatrix::wedge(state.separation, dy);
  auto up = inc.upper();
  const auto sk = skew_part.upper();
  for (std::size_t k = 0; k < up.size(); ++k) up[k] -= 2.0 * sk[k] * dt;
  return inc;
}

std::string trajectory_csv_header(std::size_t dim, bool verbose) {
  std::string h = "t,tau,V,U,W";
  if (verbose) {
    for (std::size_t i = 0; i < dim; ++i) h += ",A" + std::to_string(i + 1);
    for (std::size_t i = 0; i < dim; ++i) h += ",B" + std::to_string(i + 1);
  }
  return h;
}

std::string trajectory_csv_row(const CoupledState& state, const Summaries& summ, bool verbose) {
  std::string r = format_double(state.t_time) + "," + format_double(state.tau_time) + "," +
                  format_double(summ.v) + "," + format_double(summ.u) + ",";
  if (summ.w) r += format_double(*summ.w);
  if (verbose) {
    const Vector a = state.a_path();
    for (double x : a) r += "," + format_double(x);
    for (double x : state.b_path) r += "," + format_double(x);
  }
  return r;
}

}  // namespace levycouple
