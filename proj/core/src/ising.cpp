#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "admm.hpp"
#include "suffreduce/error.hpp"
#include "suffreduce/estimators.hpp"

namespace suffreduce {

namespace {

void check_ising_limit(std::size_t p, const char* what) {
  if (p > kIsingLimit)
    throw LimitExceeded(std::string(what) + ": dimension " + std::to_string(p) +
                        " exceeds the enumeration limit " + std::to_string(kIsingLimit));
}

// Off-diagonal soft threshold; the diagonal stays at zero.
SymMatrix soft_offdiag(const SymMatrix& v, const SymMatrix& lambda, double s) {
  SymMatrix out = detail::soft_threshold(v, lambda, s);
  for (std::size_t i = 0; i < v.dim(); ++i) out(i, i) = 0.0;
  return out;
}

double offdiag_l1(const SymMatrix& theta, const SymMatrix& lambda) {
  double s = 0.0;
  for (std::size_t i = 0; i < theta.dim(); ++i)
    for (std::size_t j = i + 1; j < theta.dim(); ++j) s += 2.0 * lambda(i, j) * std::abs(theta(i, j));
  return s;
}

} // namespace

LogPartition ising_logpartition(const SymMatrix& theta) {
  const std::size_t p = theta.dim();
  check_ising_limit(p, "ising_logpartition");
  LogPartition out;
  out.moment = SymMatrix(p);
  double diag = 0.0;
  for (std::size_t i = 0; i < p; ++i) diag += theta(i, i);

  const std::size_t states = std::size_t{1} << p;
  Vector energy(states);
  std::vector<double> u(p);
  double emax = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t i = 0; i < p; ++i) u[i] = ((s >> i) & 1U) ? -1.0 : 1.0;
    double e = diag;
    for (std::size_t i = 0; i < p; ++i) {
      double row = 0.0;
      for (std::size_t j = i + 1; j < p; ++j) row += theta(i, j) * u[j];
      e += 2.0 * u[i] * row;
    }
    energy[s] = e;
    emax = std::max(emax, e);
  }
  double total = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    const double w = std::exp(energy[s] - emax);
    total += w;
    for (std::size_t i = 0; i < p; ++i) u[i] = ((s >> i) & 1U) ? -1.0 : 1.0;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i + 1; j < p; ++j) out.moment(i, j) += w * u[i] * u[j];
  }
  out.value = emax + std::log(total);
  for (std::size_t i = 0; i < p; ++i) {
    out.moment(i, i) = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) out.moment(i, j) /= total;
  }
  return out;
}

SolveReport ising_pmle(const SymMatrix& x, const SymMatrix& lambda, const SolverOptions& opts) {
  const std::size_t p = x.dim();
  check_ising_limit(p, "ising_pmle");
  if (lambda.dim() != p) throw InvalidArgument("ising_pmle: weight dimension mismatch");
  for (double v : lambda.packed())
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("ising_pmle: weights must be nonnegative");
  if (!(opts.tol > 0.0) || opts.max_iter == 0) throw InvalidArgument("ising_pmle: bad solver options");

  const double scale = detail::problem_scale(x);
  auto smooth = [&x](const SymMatrix& theta, LogPartition& lp) {
    lp = ising_logpartition(theta);
    return lp.value - inner(x, theta);
  };
  auto gradient = [&x, p](const LogPartition& lp) {
    SymMatrix g = lp.moment - x;
    for (std::size_t i = 0; i < p; ++i) g(i, i) = 0.0;
    return g;
  };

  SolveReport rep;
  SymMatrix theta(p);
  LogPartition lp;
  double f = smooth(theta, lp);
  double step = 1.0;
  rep.objective_trace.push_back(f + offdiag_l1(theta, lambda));

  for (std::size_t it = 0;; ++it) {
    const SymMatrix g = gradient(lp);
    rep.kkt_residual = max_abs_diff(theta, soft_offdiag(theta - g, lambda, 1.0)) / scale;
    rep.iterations = it;
    if (rep.kkt_residual <= opts.tol) {
      rep.converged = true;
      break;
    }
    if (it == opts.max_iter) break;

    // Backtrack until the quadratic model majorizes the smooth part.
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      SymMatrix cand = soft_offdiag(theta - step * g, lambda, step);
      const SymMatrix delta = cand - theta;
      LogPartition lpc;
      const double fc = smooth(cand, lpc);
      const double model = f + inner(g, delta) + inner(delta, delta) / (2.0 * step);
      if (fc <= model + 1e-15 * std::abs(f)) {
        theta = std::move(cand);
        lp = std::move(lpc);
        f = fc;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    rep.objective_trace.push_back(f + offdiag_l1(theta, lambda));
    step *= 1.5;
  }

  rep.objective = rep.objective_trace.back();
  SymMatrix dual = x - lp.moment;
  for (std::size_t i = 0; i < p; ++i) dual(i, i) = 0.0;
  rep.dual = std::move(dual);
  rep.support = detail::support_of(theta);
  rep.theta = std::move(theta);
  return rep;
}

SolveReport ising_pmle(const SymMatrix& x, double lambda, const SolverOptions& opts) {
  return ising_pmle(x, SymMatrix(x.dim(), lambda), opts);
}

} // namespace suffreduce
