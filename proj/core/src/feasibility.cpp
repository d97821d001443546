#include "feasibility.hpp"

#include <cmath>
#include <limits>

#include "suffreduce/error.hpp"

namespace suffreduce::detail {

FeasibilityResult nonnegative_solution(const Matrix& a, const Vector& b, double tol) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != m) throw InvalidArgument("feasibility: rhs length mismatch");

  // Tableau columns: n structural, m artificial, 1 rhs.
  const std::size_t width = n + m + 1;
  const std::size_t rhs = n + m;
  Matrix t(m, width);
  for (std::size_t i = 0; i < m; ++i) {
    const double s = b[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t(i, j) = s * a(i, j);
    t(i, n + i) = 1.0;
    t(i, rhs) = s * b[i];
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  // Reduced costs of the phase-I objective (sum of artificials).
  Vector cost(width, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[j] -= t(i, j);
  for (std::size_t i = 0; i < m; ++i) cost[rhs] -= t(i, rhs);

  constexpr double kPivotTol = 1e-11;
  const std::size_t max_pivots = 50 * (n + m) + 1000;
  for (std::size_t iter = 0;; ++iter) {
    if (iter > max_pivots) throw ConvergenceError("feasibility: simplex pivot budget exhausted");
    std::size_t enter = width;
    for (std::size_t j = 0; j < n + m; ++j)
      if (cost[j] < -kPivotTol) {
        enter = j;
        break;
      }
    if (enter == width) break;

    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double piv = t(i, enter);
      if (piv <= kPivotTol) continue;
      const double ratio = t(i, rhs) / piv;
      if (ratio < best - 1e-14 || (std::abs(ratio - best) <= 1e-14 && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == m) break;  // unbounded direction; cannot happen for a phase-I objective

    const double piv = t(leave, enter);
    auto prow = t.row(leave);
    for (double& x : prow) x /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = t(i, enter);
      if (f == 0.0) continue;
      auto r = t.row(i);
      for (std::size_t j = 0; j < width; ++j) r[j] -= f * prow[j];
    }
    const double fc = cost[enter];
    for (std::size_t j = 0; j < width; ++j) cost[j] -= fc * prow[j];
    basis[leave] = enter;
  }

  FeasibilityResult out;
  out.weights.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) out.weights[basis[i]] = std::max(0.0, t(i, rhs));
  double res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double s = -b[i];
    for (std::size_t j = 0; j < n; ++j) s += a(i, j) * out.weights[j];
    res = std::max(res, std::abs(s));
  }
  out.residual = res;
  out.feasible = res <= tol;
  return out;
}

} // namespace suffreduce::detail
