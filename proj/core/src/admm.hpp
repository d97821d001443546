#pragma once

#include <functional>
#include <limits>

#include "suffreduce/estimators.hpp"
#include "suffreduce/symmat.hpp"

namespace suffreduce::detail {

/// sign(v) max(|v| - s * t, 0) entrywise.
SymMatrix soft_threshold(const SymMatrix& v, const SymMatrix& t, double s = 1.0);

/// sum_ij lambda_ij |theta_ij| over the full matrix.
double weighted_l1(const SymMatrix& theta, const SymMatrix& lambda);

/// max(1, max|x|); KKT residuals and residual gates are divided by it.
double problem_scale(const SymMatrix& x);

SymMatrix support_of(const SymMatrix& theta);
Vector support_of(const Vector& theta);

/// Scaled-form ADMM for min f(theta) + g(z) s.t. theta = z:
///   theta = prox_f(z - u), z = prox_g(theta + u), u += theta - z.
/// y = rho u is a subgradient of g at z after every z-step.
struct AdmmPlugins {
  std::function<SymMatrix(const SymMatrix& v, double rho)> prox_f;
  std::function<SymMatrix(const SymMatrix& v, double rho)> prox_g;
  /// Scaled KKT residual at (theta, z, y); +inf when not certifiable.
  std::function<double(const SymMatrix& theta, const SymMatrix& z, const SymMatrix& y)> kkt;
  double scale = 1.0;
};

struct AdmmResult {
  SymMatrix theta, z, y;
  double kkt = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  bool converged = false;
};

AdmmResult admm(const AdmmPlugins& plugins, SymMatrix z0, const SolverOptions& opts);

} // namespace suffreduce::detail
