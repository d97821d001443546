#include "admm.hpp"

#include <algorithm>
#include <cmath>

namespace suffreduce::detail {

SymMatrix soft_threshold(const SymMatrix& v, const SymMatrix& t, double s) {
  SymMatrix out(v.dim());
  auto src = v.packed();
  auto thr = t.packed();
  auto dst = out.packed();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double m = std::abs(src[i]) - s * thr[i];
    dst[i] = m > 0.0 ? std::copysign(m, src[i]) : 0.0;
  }
  return out;
}

double weighted_l1(const SymMatrix& theta, const SymMatrix& lambda) {
  double s = 0.0;
  const std::size_t p = theta.dim();
  for (std::size_t i = 0; i < p; ++i) {
    s += lambda(i, i) * std::abs(theta(i, i));
    for (std::size_t j = i + 1; j < p; ++j) s += 2.0 * lambda(i, j) * std::abs(theta(i, j));
  }
  return s;
}

double problem_scale(const SymMatrix& x) { return std::max(1.0, max_abs(x)); }

SymMatrix support_of(const SymMatrix& theta) {
  const double cut = kSupportTol * max_abs(theta);
  return theta.map([cut](double v) { return std::abs(v) > cut ? 1.0 : 0.0; });
}

Vector support_of(const Vector& theta) {
  double m = 0.0;
  for (double v : theta) m = std::max(m, std::abs(v));
  Vector out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    out[i] = std::abs(theta[i]) > kSupportTol * m ? 1.0 : 0.0;
  return out;
}

AdmmResult admm(const AdmmPlugins& pl, SymMatrix z0, const SolverOptions& opts) {
  const std::size_t p = z0.dim();
  double rho = opts.rho;
  AdmmResult res;
  SymMatrix z = std::move(z0);
  SymMatrix u(p);
  SymMatrix theta = z;
  double gate = opts.tol;

  constexpr double kRelax = 1.6;
  constexpr std::size_t kForcedCheck = 100;
  constexpr std::size_t kAdaptEvery = 10;
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    theta = pl.prox_f(z - u, rho);
    SymMatrix z_prev = std::move(z);
    SymMatrix relaxed = kRelax * theta;
    relaxed += (1.0 - kRelax) * z_prev;
    z = pl.prox_g(relaxed + u, rho);
    u += relaxed;
    u -= z;
    res.iterations = it;

    const double r = max_abs_diff(theta, z);
    const double s = rho * max_abs_diff(z, z_prev);
    const bool small = std::max(r, s) <= gate * pl.scale;
    if (small || it % kForcedCheck == 0) {
      const double k = pl.kkt(theta, z, rho * u);
      res.kkt = k;
      if (k <= opts.tol) {
        res.converged = true;
        break;
      }
      if (small) gate /= 10.0;
    }
    if (it % kAdaptEvery == 0) {
      if (r > 10.0 * s) {
        rho *= 2.0;
        u *= 0.5;
      } else if (s > 10.0 * r) {
        rho *= 0.5;
        u *= 2.0;
      }
    }
  }
  if (!res.converged) res.kkt = pl.kkt(theta, z, rho * u);
  res.y = rho * u;
  res.theta = std::move(theta);
  res.z = std::move(z);
  return res;
}

} // namespace suffreduce::detail
