#include <algorithm>
#include <cmath>
#include <limits>

#include "admm.hpp"
#include "suffreduce/error.hpp"
#include "suffreduce/estimators.hpp"

namespace suffreduce {

using detail::problem_scale;
using detail::soft_threshold;
using detail::weighted_l1;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_square_weights(const SymMatrix& x, const SymMatrix& lambda, const char* what) {
  if (lambda.dim() != x.dim()) throw InvalidArgument(std::string(what) + ": weight dimension mismatch");
  for (double v : lambda.packed())
    if (!(v >= 0.0) || !std::isfinite(v))
      throw InvalidArgument(std::string(what) + ": weights must be finite and nonnegative");
}

void require_options(const SolverOptions& o) {
  if (!(o.tol > 0.0) || !(o.rho > 0.0) || o.max_iter == 0)
    throw InvalidArgument("solver options: tol, rho and max_iter must be positive");
}

// argmin -log det t + <x, t> + rho/2 ||t - v||^2: rho t - t^{-1} = rho v - x.
SymMatrix logdet_prox(const SymMatrix& x, const SymMatrix& v, double rho) {
  SymMatrix m = rho * v;
  m -= x;
  const auto e = eigh(m);
  return e.spectral_map([rho](double d) {
    const double r = std::sqrt(d * d + 4.0 * rho);
    return d >= 0.0 ? (d + r) / (2.0 * rho) : 2.0 / (r - d);
  });
}

SymMatrix psd_floor(const SymMatrix& v, double eps) {
  return eigh(v).spectral_map([eps](double d) { return std::max(d, eps); });
}

double neg_logdet_or_inf(const SymMatrix& theta) {
  const auto ld = log_det_spd(theta);
  return ld ? -*ld : kInf;
}

SolveReport from_admm(detail::AdmmResult r, bool output_theta) {
  SolveReport rep;
  rep.theta = output_theta ? std::move(r.theta) : std::move(r.z);
  rep.dual = std::move(r.y);
  rep.kkt_residual = r.kkt;
  rep.iterations = r.iterations;
  rep.converged = r.converged;
  rep.support = detail::support_of(rep.matrix());
  return rep;
}

} // namespace

SolveReport glasso(const SymMatrix& x, const SymMatrix& lambda, const SolverOptions& opts) {
  require_square_weights(x, lambda, "glasso");
  require_options(opts);
  const std::size_t p = x.dim();
  const double scale = problem_scale(x);
  if (max_abs(lambda) == 0.0 && p > 0 && min_eigenvalue(x) <= 1e-12 * scale)
    throw NoSolution("glasso: unpenalized likelihood with a singular covariance has no maximizer");
  for (std::size_t i = 0; i < p; ++i)
    if (!(x(i, i) + lambda(i, i) > 0.0))
      throw NoSolution("glasso: X_ii + Lambda_ii must be positive for every i");

  detail::AdmmPlugins pl;
  pl.scale = scale;
  pl.prox_f = [&x](const SymMatrix& v, double rho) { return logdet_prox(x, v, rho); };
  pl.prox_g = [&lambda](const SymMatrix& v, double rho) { return soft_threshold(v, lambda, 1.0 / rho); };
  pl.kkt = [&x, &lambda, scale, p](const SymMatrix&, const SymMatrix& z, const SymMatrix&) {
    const auto w = inverse_spd(z);
    if (!w) return kInf;
    double worst = 0.0;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i; j < p; ++j) {
        const double g = x(i, j) - (*w)(i, j);
        const double zij = z(i, j);
        const double v = zij != 0.0 ? std::abs(g + std::copysign(lambda(i, j), zij))
                                    : std::max(0.0, std::abs(g) - lambda(i, j));
        worst = std::max(worst, v);
      }
    return worst / scale;
  };
  SymMatrix z0(p);
  for (std::size_t i = 0; i < p; ++i) z0(i, i) = 1.0 / (x(i, i) + lambda(i, i));
  SolveReport rep = from_admm(detail::admm(pl, std::move(z0), opts), false);
  rep.objective = neg_logdet_or_inf(rep.matrix()) + inner(x, rep.matrix()) + weighted_l1(rep.matrix(), lambda);
  return rep;
}

SolveReport positive_invcov(const SymMatrix& x, const SolverOptions& opts) {
  require_options(opts);
  const std::size_t p = x.dim();
  for (std::size_t i = 0; i < p; ++i)
    if (!(x(i, i) > 0.0)) throw NoSolution("positive_invcov: diagonal of X must be positive");
  const double scale = problem_scale(x);

  detail::AdmmPlugins pl;
  pl.scale = scale;
  pl.prox_f = [&x](const SymMatrix& v, double rho) { return logdet_prox(x, v, rho); };
  pl.prox_g = [p](const SymMatrix& v, double) {
    SymMatrix out = v;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i + 1; j < p; ++j) out(i, j) = std::min(out(i, j), 0.0);
    return out;
  };
  pl.kkt = [&x, scale, p](const SymMatrix&, const SymMatrix& z, const SymMatrix&) {
    const auto w = inverse_spd(z);
    if (!w) return kInf;
    double worst = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      worst = std::max(worst, std::abs((*w)(i, i) - x(i, i)));
      for (std::size_t j = i + 1; j < p; ++j) {
        const double g = (*w)(i, j) - x(i, j);
        worst = std::max(worst, z(i, j) < 0.0 ? std::abs(g) : std::max(0.0, -g));
      }
    }
    return worst / scale;
  };
  SymMatrix z0(p);
  for (std::size_t i = 0; i < p; ++i) z0(i, i) = 1.0 / x(i, i);
  SolveReport rep = from_admm(detail::admm(pl, std::move(z0), opts), false);
  rep.objective = neg_logdet_or_inf(rep.matrix()) + inner(x, rep.matrix());
  return rep;
}

SymMatrix fantope_project(const SymMatrix& w, std::size_t k) {
  const std::size_t p = w.dim();
  if (k < 1 || k > p) throw InvalidArgument("fantope_project: need 1 <= k <= p");
  const auto e = eigh(w);
  const Vector& d = e.values;
  const double target = static_cast<double>(k);
  auto mass = [&d](double nu) {
    double s = 0.0;
    for (double v : d) s += std::clamp(v - nu, 0.0, 1.0);
    return s;
  };
  // mass is nonincreasing in nu, equal to p at lo and 0 at hi.
  double lo = d.back() - 1.0, hi = d.front();
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mass(mid) > target) lo = mid;
    else hi = mid;
  }
  double nu = 0.5 * (lo + hi);
  // Solve exactly on the linear piece containing nu.
  double saturated = 0.0, partial_sum = 0.0;
  std::size_t partial = 0;
  for (double v : d) {
    const double g = v - nu;
    if (g >= 1.0) saturated += 1.0;
    else if (g > 0.0) {
      partial_sum += v;
      ++partial;
    }
  }
  if (partial > 0) {
    const double exact = (partial_sum + saturated - target) / static_cast<double>(partial);
    if (std::abs(mass(exact) - target) <= std::abs(mass(nu) - target)) nu = exact;
  }
  Vector gamma(p);
  double trace = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    gamma[i] = std::clamp(d[i] - nu, 0.0, 1.0);
    trace += gamma[i];
  }
  if (std::abs(trace - target) > 1e-12 * std::max(1.0, target))
    throw ConvergenceError("fantope_project: trace bisection did not reach tolerance");
  return e.synthesize(gamma);
}

SolveReport fantope_spca(const SymMatrix& x, const SymMatrix& lambda, std::size_t k,
                         const SolverOptions& opts) {
  require_square_weights(x, lambda, "fantope_spca");
  require_options(opts);
  const std::size_t p = x.dim();
  if (k < 1 || k > p) throw InvalidArgument("fantope_spca: need 1 <= k <= p");
  const double scale = problem_scale(x);

  detail::AdmmPlugins pl;
  pl.scale = scale;
  pl.prox_f = [&x, k](const SymMatrix& v, double rho) {
    SymMatrix shifted = v;
    shifted += (1.0 / rho) * x;
    return fantope_project(shifted, k);
  };
  pl.prox_g = [&lambda](const SymMatrix& v, double rho) { return soft_threshold(v, lambda, 1.0 / rho); };
  pl.kkt = [&x, &lambda, k, scale](const SymMatrix&, const SymMatrix& z, const SymMatrix& y) {
    SymMatrix probe = z;
    probe += x;
    probe -= y;
    const double normal = max_abs_diff(z, fantope_project(probe, k));
    const double sub = max_abs_diff(z, soft_threshold(z + y, lambda));
    return std::max(normal, sub) / scale;
  };
  SymMatrix z0 = SymMatrix::identity(p);
  z0 *= static_cast<double>(k) / static_cast<double>(p);
  SolveReport rep = from_admm(detail::admm(pl, std::move(z0), opts), false);
  rep.objective = inner(x, rep.matrix()) - weighted_l1(rep.matrix(), lambda);
  return rep;
}

SolveReport fantope_spca(const SymMatrix& x, double lambda, std::size_t k, const SolverOptions& opts) {
  return fantope_spca(x, SymMatrix(x.dim(), lambda), k, opts);
}

SolveReport sparse_cov(const SymMatrix& x, const SymMatrix& lambda, double eps,
                       const SolverOptions& opts) {
  require_square_weights(x, lambda, "sparse_cov");
  require_options(opts);
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("sparse_cov: eps must be positive");
  const std::size_t p = x.dim();
  const double scale = problem_scale(x);

  detail::AdmmPlugins pl;
  pl.scale = scale;
  pl.prox_f = [&x, eps](const SymMatrix& v, double rho) {
    SymMatrix m = rho * v;
    m += x;
    m *= 1.0 / (1.0 + rho);
    return psd_floor(m, eps);
  };
  pl.prox_g = [&lambda](const SymMatrix& v, double rho) { return soft_threshold(v, lambda, 1.0 / rho); };
  pl.kkt = [&x, &lambda, eps, scale](const SymMatrix& theta, const SymMatrix&, const SymMatrix& y) {
    const double normal = max_abs_diff(theta, psd_floor(x - y, eps));
    const double sub = max_abs_diff(theta, soft_threshold(theta + y, lambda));
    return std::max(normal, sub) / scale;
  };
  SymMatrix z0(p);
  for (std::size_t i = 0; i < p; ++i) z0(i, i) = std::max(x(i, i), eps);
  SolveReport rep = from_admm(detail::admm(pl, std::move(z0), opts), true);
  const SymMatrix diff = x - rep.matrix();
  rep.objective = 0.5 * inner(diff, diff) + weighted_l1(rep.matrix(), lambda);
  return rep;
}

SolveReport sparse_cov(const SymMatrix& x, double lambda, double eps, const SolverOptions& opts) {
  return sparse_cov(x, SymMatrix(x.dim(), lambda), eps, opts);
}

} // namespace suffreduce
