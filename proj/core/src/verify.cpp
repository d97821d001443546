#include "suffreduce/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "json.hpp"
#include "suffreduce/error.hpp"
#include "suffreduce/reduce.hpp"

namespace suffreduce {

namespace {

// (|x| - l) + l can land a couple of ulps away from x.
bool within_ulps(const Vector& a, const Vector& b, int n) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double lo = b[i], hi = b[i];
    for (int k = 0; k < n; ++k) {
      lo = std::nextafter(lo, -std::numeric_limits<double>::infinity());
      hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
    }
    if (a[i] < lo || a[i] > hi) return false;
  }
  return true;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Independent kernels. These deliberately avoid the solver paths: Jacobi
// instead of QL, Gauss-Jordan instead of Cholesky, direct enumeration.

std::optional<SymMatrix> gauss_jordan_inverse(const SymMatrix& a) {
  const std::size_t p = a.dim();
  Matrix m = a.to_dense();
  Matrix inv = Matrix::identity(p);
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < p; ++r)
      if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
    if (std::abs(m(piv, c)) < 1e-300) return std::nullopt;
    if (piv != c)
      for (std::size_t j = 0; j < p; ++j) {
        std::swap(m(piv, j), m(c, j));
        std::swap(inv(piv, j), inv(c, j));
      }
    const double d = m(c, c);
    for (std::size_t j = 0; j < p; ++j) {
      m(c, j) /= d;
      inv(c, j) /= d;
    }
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c || m(r, c) == 0.0) continue;
      const double f = m(r, c);
      for (std::size_t j = 0; j < p; ++j) {
        m(r, j) -= f * m(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  SymMatrix out(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) out(i, j) = 0.5 * (inv(i, j) + inv(j, i));
  return out;
}

bool positive_definite_jacobi(const SymMatrix& a) {
  return a.dim() == 0 || eigh(a, EigenMethod::Jacobi).values.back() > 0.0;
}

SymMatrix floor_jacobi(const SymMatrix& v, double eps) {
  return eigh(v, EigenMethod::Jacobi).spectral_map([eps](double d) { return std::max(d, eps); });
}

SymMatrix fantope_jacobi(const SymMatrix& w, std::size_t k) {
  const auto e = eigh(w, EigenMethod::Jacobi);
  double lo = e.values.back() - 1.0, hi = e.values.front();
  auto mass = [&e](double nu) {
    double s = 0.0;
    for (double v : e.values) s += std::clamp(v - nu, 0.0, 1.0);
    return s;
  };
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (mass(mid) > static_cast<double>(k) ? lo : hi) = mid;
  }
  const double nu = 0.5 * (lo + hi);
  return e.spectral_map([nu](double v) { return std::clamp(v - nu, 0.0, 1.0); });
}

SymMatrix soft(const SymMatrix& v, const SymMatrix& t) {
  SymMatrix out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i)
    for (std::size_t j = i; j < v.dim(); ++j) {
      const double a = std::abs(v(i, j)) - t(i, j);
      out(i, j) = a > 0.0 ? (v(i, j) > 0.0 ? a : -a) : 0.0;
    }
  return out;
}

SymMatrix ising_moment_enumerated(const SymMatrix& theta) {
  const std::size_t p = theta.dim();
  if (p > kIsingLimit) throw LimitExceeded("independent_kkt: Ising dimension above the enumeration limit");
  const std::size_t states = std::size_t{1} << p;
  Vector logw(states);
  for (std::size_t s = 0; s < states; ++s) {
    double e = 0.0;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) {
        const double ui = ((s >> i) & 1U) ? -1.0 : 1.0;
        const double uj = ((s >> j) & 1U) ? -1.0 : 1.0;
        e += theta(i, j) * ui * uj;
      }
    logw[s] = e;
  }
  const double m = *std::max_element(logw.begin(), logw.end());
  SymMatrix mom(p);
  double z = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    const double w = std::exp(logw[s] - m);
    z += w;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i; j < p; ++j)
        mom(i, j) += w * (((s >> i) & 1U) == ((s >> j) & 1U) ? 1.0 : -1.0);
  }
  mom *= 1.0 / z;
  return mom;
}

double scale_of(const Input& x) {
  double m = 0.0;
  if (const auto* v = std::get_if<Vector>(&x))
    for (double a : *v) m = std::max(m, std::abs(a));
  else
    m = max_abs(std::get<SymMatrix>(x));
  return std::max(1.0, m);
}

double vector_kkt(const EstimatorSpec& spec, const Vector& x, const Vector& t) {
  double worst = 0.0;
  if (spec.family == Family::NNLS) {
    for (std::size_t i = 0; i < x.size(); ++i)
      worst = std::max(worst, t[i] > 0.0 ? std::abs(x[i] - t[i]) : t[i] == 0.0 ? std::max(0.0, x[i]) : -t[i]);
    return worst;
  }
  if (spec.penalty.kind == PenaltyKind::GroupL2) {
    const Vector lam = spec.penalty.block_weights();
    for (std::size_t b = 0; b < spec.penalty.blocks.block_count(); ++b) {
      const auto& blk = spec.penalty.blocks.blocks()[b];
      double tn = 0.0, xn = 0.0;
      for (std::size_t i : blk) {
        tn += t[i] * t[i];
        xn += x[i] * x[i];
      }
      tn = std::sqrt(tn);
      xn = std::sqrt(xn);
      if (tn == 0.0) {
        worst = std::max(worst, std::max(0.0, xn - lam[b]));
        continue;
      }
      double r = 0.0;
      for (std::size_t i : blk) {
        const double g = x[i] - t[i] - lam[b] * t[i] / tn;
        r += g * g;
      }
      worst = std::max(worst, std::sqrt(r));
    }
    return worst;
  }
  const Vector lam = spec.penalty.coordinate_weights(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double g = x[i] - t[i];
    worst = std::max(worst, t[i] != 0.0 ? std::abs(g - std::copysign(lam[i], t[i]))
                                        : std::max(0.0, std::abs(g) - lam[i]));
  }
  return worst;
}

double matrix_kkt(const EstimatorSpec& spec, const SymMatrix& x, const SolveReport& r) {
  const SymMatrix& t = r.matrix();
  const std::size_t p = x.dim();
  const SymMatrix* y = r.dual ? std::get_if<SymMatrix>(&*r.dual) : nullptr;
  double worst = 0.0;
  switch (spec.family) {
    case Family::GraphicalLasso:
    case Family::PositiveInvCov: {
      if (!positive_definite_jacobi(t)) return kInf;
      const auto w = gauss_jordan_inverse(t);
      if (!w) return kInf;
      const bool positivity = spec.family == Family::PositiveInvCov;
      const SymMatrix lam = positivity ? SymMatrix(p) : spec.penalty.weight_matrix(p);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
          const double g = x(i, j) - (*w)(i, j);
          double v;
          if (positivity && i != j) {
            if (t(i, j) > 0.0) v = t(i, j);
            else v = t(i, j) < 0.0 ? std::abs(g) : std::max(0.0, g);
          } else if (t(i, j) != 0.0) {
            v = std::abs(g + std::copysign(lam(i, j), t(i, j)));
          } else {
            v = std::max(0.0, std::abs(g) - lam(i, j));
          }
          worst = std::max(worst, v);
        }
      return worst;
    }
    case Family::SparseCovariance: {
      if (!y) return kInf;
      const SymMatrix lam = spec.penalty.weight_matrix(p);
      worst = std::max(max_abs_diff(t, floor_jacobi(x - *y, spec.eps)), max_abs_diff(t, soft(t + *y, lam)));
      return worst;
    }
    case Family::FantopeSPCA: {
      if (!y) return kInf;
      const SymMatrix lam = spec.penalty.weight_matrix(p);
      SymMatrix probe = t;
      probe += x;
      probe -= *y;
      return std::max(max_abs_diff(t, fantope_jacobi(probe, spec.k)), max_abs_diff(t, soft(t + *y, lam)));
    }
    case Family::IsingPMLE: {
      SymMatrix lam = spec.penalty.weight_matrix(p);
      for (std::size_t i = 0; i < p; ++i) {
        worst = std::max(worst, std::abs(t(i, i)));
        lam(i, i) = 0.0;
      }
      // Moments factor over the components of the support.
      SymMatrix mom = SymMatrix::identity(p);
      const Partition comps = components_above(abs(t), 0.0);
      for (const auto& blk : comps.blocks()) {
        const SymMatrix mb = ising_moment_enumerated(t.principal(blk));
        for (std::size_t a = 0; a < blk.size(); ++a)
          for (std::size_t b = a; b < blk.size(); ++b) mom(blk[a], blk[b]) = mb(a, b);
      }
      SymMatrix step = t - (mom - x);
      for (std::size_t i = 0; i < p; ++i) step(i, i) = 0.0;
      SymMatrix prox = soft(step, lam);
      return std::max(worst, max_abs_diff(t, prox));
    }
    default:
      throw InvalidArgument("independent_kkt: unsupported family");
  }
}

bool ultrametric_by_triples(const SymMatrix& b) {
  const std::size_t p = b.dim();
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < p; ++k)
        if (b(i, j) < std::min(b(i, k), b(j, k))) return false;
  return true;
}

Input apply_mask(const MaskProjection& mask, const Input& x) {
  if (const auto* d = std::get_if<Vector>(&mask)) {
    const auto& v = std::get<Vector>(x);
    if (d->size() != v.size()) throw InvalidArgument("mask length mismatch");
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (*d)[i] * v[i];
    return out;
  }
  return hadamard(std::get<SymMatrix>(mask), std::get<SymMatrix>(x));
}

std::size_t count_outside(const MaskProjection& mask, const Input& theta, double rel_tol) {
  std::size_t n = 0;
  if (const auto* d = std::get_if<Vector>(&mask)) {
    const auto& t = std::get<Vector>(theta);
    double m = 0.0;
    for (double v : t) m = std::max(m, std::abs(v));
    for (std::size_t i = 0; i < t.size(); ++i)
      if ((*d)[i] == 0.0 && std::abs(t[i]) > rel_tol * m) ++n;
    return n;
  }
  const auto& b = std::get<SymMatrix>(mask);
  const auto& t = std::get<SymMatrix>(theta);
  const double cut = rel_tol * max_abs(t);
  for (std::size_t i = 0; i < t.dim(); ++i)
    for (std::size_t j = i; j < t.dim(); ++j)
      if (b(i, j) == 0.0 && std::abs(t(i, j)) > cut) ++n;
  return n;
}

double max_abs_diff_input(const Input& a, const Input& b) {
  if (const auto* va = std::get_if<Vector>(&a)) {
    const auto& vb = std::get<Vector>(b);
    double m = 0.0;
    for (std::size_t i = 0; i < va->size(); ++i) m = std::max(m, std::abs((*va)[i] - vb[i]));
    return m;
  }
  return max_abs_diff(std::get<SymMatrix>(a), std::get<SymMatrix>(b));
}

} // namespace

double independent_kkt(const EstimatorSpec& spec, const Input& x, const SolveReport& report) {
  const double scale = scale_of(x);
  if (!spec.symmetric()) return vector_kkt(spec, std::get<Vector>(x), report.vector()) / scale;
  return matrix_kkt(spec, std::get<SymMatrix>(x), report) / scale;
}

SufficiencyReport check_sufficiency(const EstimatorSpec& spec, const Input& x, double tol,
                                    const std::optional<MaskProjection>& mask_override) {
  spec.validate();
  SufficiencyReport rep;
  rep.family = spec.family;
  if (const auto* v = std::get_if<Vector>(&x)) rep.dim = v->size();
  else rep.dim = std::get<SymMatrix>(x).dim();
  if (spec.penalty.scalar_weight()) rep.lambda = spec.penalty.scalar();

  const Group group = spec.group();
  const ReducedProblem red = reduce_input(spec.penalty, group, x);
  const MaskProjection mask = mask_override ? *mask_override : red.mask;
  const Input rx = mask_override ? apply_mask(mask, x) : red.reduced;
  rep.conditions = check_projection_conditions(mask, x, spec.penalty, group);

  // The reduced solve sees R(x) only.
  const SolveReport tx = solve(spec, x);
  const SolveReport trx = solve(spec, rx);
  rep.converged = tx.converged && trx.converged;
  rep.kkt_residual = std::max(independent_kkt(spec, x, tx), independent_kkt(spec, rx, trx));
  rep.max_deviation = max_abs_diff_input(tx.theta, trx.theta);
  const double fx = objective(spec, x, tx.theta);
  const double frx = objective(spec, x, trx.theta);
  rep.objective_gap = std::abs(fx - frx) / (1.0 + std::abs(fx));
  rep.containment_violations = count_outside(mask, tx.theta, kContainmentTol);

  const bool strict = spec.family != Family::FantopeSPCA;
  const bool agree = strict ? rep.max_deviation <= tol : rep.objective_gap <= tol;
  const bool kkt_ok = rep.kkt_residual <= 10.0 * spec.options.tol;
  rep.pass = rep.conditions.all() && rep.converged && kkt_ok && agree && rep.containment_violations == 0;
  if (!rep.conditions.all()) rep.note = "projection conditions fail";
  else if (!rep.converged) rep.note = "solver did not converge";
  else if (!kkt_ok) rep.note = "independent KKT check fails";
  else if (!agree) rep.note = strict ? "solutions differ" : "objective values differ";
  else if (rep.containment_violations) rep.note = "solution leaves the mask support";
  return rep;
}

std::vector<std::pair<std::size_t, std::size_t>> check_support_containment(const SymMatrix& theta,
                                                                          const Partition& partition,
                                                                          double tol) {
  if (partition.size() != theta.dim())
    throw InvalidArgument("check_support_containment: partition size mismatch");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < theta.dim(); ++i)
    for (std::size_t j = i + 1; j < theta.dim(); ++j)
      if (!partition.same_block(i, j) && std::abs(theta(i, j)) > tol) out.emplace_back(i, j);
  return out;
}

std::vector<SymMatrix> enumerate_feasible_ultrametrics(const SymMatrix& x, double lambda) {
  const std::size_t p = x.dim();
  if (p > kEnumerationLimit)
    throw LimitExceeded("enumerate_feasible_ultrametrics: dimension " + std::to_string(p) +
                        " exceeds limit " + std::to_string(kEnumerationLimit));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
  std::vector<SymMatrix> out;
  for (std::size_t bits = 0; bits < (std::size_t{1} << pairs.size()); ++bits) {
    SymMatrix b = SymMatrix::identity(p);
    bool feasible = true;
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      const auto [i, j] = pairs[e];
      b(i, j) = ((bits >> e) & 1U) ? 1.0 : 0.0;
      if (std::abs(x(i, j)) > lambda && b(i, j) == 0.0) feasible = false;
    }
    if (feasible && ultrametric_by_triples(b)) out.push_back(std::move(b));
  }
  return out;
}

bool check_minimality_slc(const SymMatrix& x, double lambda) {
  const auto candidates = enumerate_feasible_ultrametrics(x, lambda);
  const SymMatrix s = slc(abs(x), lambda);
  auto total = [](const SymMatrix& b) { return l1_norm(b); };
  double best = kInf;
  for (const auto& b : candidates) best = std::min(best, total(b));
  std::size_t minimizers = 0;
  bool slc_is_min = false;
  for (const auto& b : candidates)
    if (total(b) == best) {
      ++minimizers;
      slc_is_min = slc_is_min || b == s;
    }
  return minimizers == 1 && slc_is_min;
}

bool ultrametric_psd_agree(const SymMatrix& b, double tol) {
  if (!is_binary(b)) throw InvalidArgument("ultrametric_psd_agree: matrix must be binary");
  for (std::size_t i = 0; i < b.dim(); ++i)
    if (b(i, i) != 1.0) throw InvalidArgument("ultrametric_psd_agree: diagonal must be 1");
  const bool psd = b.dim() == 0 || eigh(b, EigenMethod::Jacobi).values.back() >= -tol;
  return psd == ultrametric_by_triples(b);
}

// ---------------------------------------------------------------------------
// Instances

namespace {
std::size_t block_of(std::size_t j, std::size_t p, std::size_t blocks) { return j * blocks / p; }
std::size_t default_n(const InstanceOptions& o) { return o.n ? o.n : 2 * o.p + 10; }
void check_instance(const InstanceOptions& o) {
  if (o.p == 0 || o.blocks == 0 || o.blocks > o.p)
    throw InvalidArgument("instance: need p >= 1 and 1 <= blocks <= p");
}
} // namespace

SymMatrix random_covariance(std::mt19937_64& rng, const InstanceOptions& o) {
  check_instance(o);
  const std::size_t n = default_n(o);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix v(n, o.p);
  Vector f(o.blocks);
  for (std::size_t t = 0; t < n; ++t) {
    for (double& a : f) a = g(rng);
    for (std::size_t j = 0; j < o.p; ++j) v(t, j) = o.signal * f[block_of(j, o.p, o.blocks)] + g(rng);
  }
  return uncentered_covariance(v);
}

SymMatrix random_sign_moments(std::mt19937_64& rng, const InstanceOptions& o) {
  check_instance(o);
  const std::size_t n = default_n(o);
  const double q = std::clamp(0.5 + o.signal / 4.0, 0.5, 0.95);
  std::bernoulli_distribution coin(0.5), copy(q);
  Matrix v(n, o.p);
  Vector s(o.blocks);
  for (std::size_t t = 0; t < n; ++t) {
    for (double& a : s) a = coin(rng) ? 1.0 : -1.0;
    for (std::size_t j = 0; j < o.p; ++j) {
      const double latent = s[block_of(j, o.p, o.blocks)];
      v(t, j) = copy(rng) ? latent : -latent;
    }
  }
  return uncentered_covariance(v);
}

SymMatrix random_correlation(std::mt19937_64& rng, std::size_t p) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix v(p + 2, p);
  for (double& a : v.data()) a = g(rng);
  SymMatrix c = uncentered_covariance(v);
  Vector d = c.diag();
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) c(i, j) = std::clamp(c(i, j) / std::sqrt(d[i] * d[j]), -1.0, 1.0);
  for (std::size_t i = 0; i < p; ++i) c(i, i) = 1.0;
  return c;
}

Vector lambda_grid(const SymMatrix& x, std::size_t points) {
  std::vector<double> mags;
  for (std::size_t i = 0; i < x.dim(); ++i)
    for (std::size_t j = i + 1; j < x.dim(); ++j) mags.push_back(std::abs(x(i, j)));
  std::sort(mags.begin(), mags.end());
  mags.erase(std::unique(mags.begin(), mags.end()), mags.end());
  Vector out;
  if (mags.empty()) return {0.5};
  if (mags.size() == 1) return {0.5 * mags[0]};
  const std::size_t gaps = mags.size() - 1;
  for (std::size_t g = 0; g < points; ++g) {
    const double q = (static_cast<double>(g) + 0.5) / static_cast<double>(points);
    const auto k = std::min(gaps - 1, static_cast<std::size_t>(q * static_cast<double>(gaps)));
    const double lam = 0.5 * (mags[k] + mags[k + 1]);
    if (out.empty() || out.back() != lam) out.push_back(lam);
  }
  return out;
}

double separating_lambda(const SymMatrix& x, const Partition& partition) {
  if (partition.size() != x.dim()) throw InvalidArgument("separating_lambda: partition size mismatch");
  double cross = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i)
    for (std::size_t j = i + 1; j < x.dim(); ++j)
      if (!partition.same_block(i, j)) cross = std::max(cross, std::abs(x(i, j)));
  double next = kInf;
  for (std::size_t i = 0; i < x.dim(); ++i)
    for (std::size_t j = i + 1; j < x.dim(); ++j) {
      const double m = std::abs(x(i, j));
      if (m > cross) next = std::min(next, m);
    }
  return std::isfinite(next) ? 0.5 * (cross + next) : cross + 1.0;
}

// ---------------------------------------------------------------------------
// Suites

namespace {

class Recorder {
public:
  explicit Recorder(SuiteSummary& s) : s_(s) {}

  void observe(const std::string& check, double value) {
    auto [it, inserted] = s_.worst.emplace(check, value);
    if (!inserted) it->second = std::max(it->second, value);
  }
  void trial(const std::string& suite, const std::string& check, bool ok, const std::string& detail,
             double value = 0.0) {
    ++s_.trials;
    if (!ok) s_.failures.push_back({suite, check, detail, value});
  }

private:
  SuiteSummary& s_;
};

std::string describe(std::size_t p, std::optional<double> lambda) {
  std::string s = "p=" + std::to_string(p);
  if (lambda) s += " lambda=" + std::to_string(*lambda);
  return s;
}

Vector pick(const Vector& grid, std::size_t count) {
  if (count == 0 || grid.empty()) return {};
  if (count >= grid.size()) return grid;
  Vector out;
  for (std::size_t g = 0; g < count; ++g) {
    const std::size_t k = count == 1 ? grid.size() / 2 : g * (grid.size() - 1) / (count - 1);
    out.push_back(grid[k]);
  }
  return out;
}

constexpr std::size_t kIsingSuiteLimit = 8;
// Fantope ADMM can crawl near degenerate eigenvalues.
constexpr std::size_t kFantopeSuiteIter = 100000;

EstimatorSpec spec_for(Family f, double lambda, std::size_t p) {
  switch (f) {
    case Family::Lasso: return EstimatorSpec::lasso(lambda);
    case Family::NNLS: return EstimatorSpec::nnls();
    case Family::GraphicalLasso: return EstimatorSpec::graphical_lasso(lambda);
    case Family::FantopeSPCA: {
      auto s = EstimatorSpec::fantope_spca(lambda, std::min<std::size_t>(2, p));
      s.options.max_iter = kFantopeSuiteIter;
      return s;
    }
    case Family::SparseCovariance: return EstimatorSpec::sparse_covariance(lambda, 0.01);
    case Family::PositiveInvCov: return EstimatorSpec::positive_invcov();
    case Family::IsingPMLE: return EstimatorSpec::ising(lambda);
  }
  throw InvalidArgument("unknown family");
}


struct Trial {
  EstimatorSpec spec;
  Input x;
};

// Instances for one family and size; vector families draw Gaussian vectors.
std::vector<Trial> make_trials(Family f, std::size_t p, const SuiteOptions& o, std::mt19937_64& rng) {
  std::vector<Trial> out;
  for (std::size_t inst = 0; inst < o.instances; ++inst) {
    if (f == Family::Lasso || f == Family::NNLS) {
      std::normal_distribution<double> g(0.0, 1.0);
      Vector x(p);
      for (double& a : x) a = g(rng);
      if (f == Family::NNLS) {
        out.push_back({spec_for(f, 0.0, p), x});
        continue;
      }
      std::uniform_real_distribution<double> u(0.0, 1.5);
      for (std::size_t l = 0; l < std::max<std::size_t>(1, o.lambdas); ++l) out.push_back({spec_for(f, u(rng), p), x});
      continue;
    }
    InstanceOptions io;
    io.p = p;
    io.blocks = std::max<std::size_t>(1, std::min<std::size_t>(p, p / 5 + 1));
    const SymMatrix x = f == Family::IsingPMLE ? random_sign_moments(rng, io) : random_covariance(rng, io);
    if (f == Family::PositiveInvCov) {
      out.push_back({spec_for(f, 0.0, p), x});
      continue;
    }
    for (double lam : pick(lambda_grid(x), o.lambdas)) out.push_back({spec_for(f, lam, p), x});
  }
  return out;
}

std::optional<double> lambda_of(const EstimatorSpec& s) {
  if (s.penalty.scalar_weight() && s.family != Family::NNLS && s.family != Family::PositiveInvCov)
    return s.penalty.scalar();
  return std::nullopt;
}

std::size_t dim_of(const Input& x) {
  if (const auto* v = std::get_if<Vector>(&x)) return v->size();
  return std::get<SymMatrix>(x).dim();
}

void sufficiency_suite(const SuiteOptions& o, std::mt19937_64& rng, Recorder& rec) {
  const std::string suite = "sufficiency";
  for (Family f : o.families) {
    const std::string name = to_string(f);
    for (std::size_t p : o.sizes) {
      if (f == Family::IsingPMLE && p > kIsingSuiteLimit) continue;
      for (const Trial& t : make_trials(f, p, o, rng)) {
        const std::string where = describe(p, lambda_of(t.spec));
        try {
          const SufficiencyReport r = check_sufficiency(t.spec, t.x);
          rec.observe(name + ".deviation", r.max_deviation);
          rec.observe(name + ".objective_gap", r.objective_gap);
          rec.observe(name + ".kkt", r.kkt_residual);
          rec.trial(suite, name, r.pass, where + ": " + r.note, r.max_deviation);

          if (f == Family::Lasso) {
            const Vector& x = std::get<Vector>(t.x);
            const Vector lam = t.spec.penalty.coordinate_weights(x.size());
            const Vector soft = lasso(x, lam);
            const Vector hard = hard_threshold(x, lam);
            rec.trial(suite, "lasso.chain",
                      within_ulps(reconstruct_from_soft(soft, lam), hard, 2) && lasso(hard, lam) == soft, where);
          } else if (f == Family::NNLS) {
            const Vector& x = std::get<Vector>(t.x);
            rec.trial(suite, "nnls.chain", nnls(x) == positive_part(x) && nnls(positive_part(x)) == nnls(x), where);
          } else if (f != Family::FantopeSPCA) {
            const SymMatrix& x = std::get<SymMatrix>(t.x);
            const SolveReport direct = solve(t.spec, x);
            const SolveReport split = solve_decomposed(t.spec, x, 1);
            const double dev = max_abs_diff(direct.matrix(), split.matrix());
            rec.observe(name + ".decomposition", dev);
            rec.trial(suite, name + ".decomposition", dev <= kEqualityTol && split.converged, where, dev);
            if (f == Family::GraphicalLasso) {
              const Partition support = components_above(std::get<SymMatrix>(direct.support), 0.5);
              rec.trial(suite, "glasso.exact_thresholding",
                        support == threshold_components(x, t.spec.penalty.scalar()), where);
            }
          }
        } catch (const std::exception& e) {
          rec.trial(suite, name, false, where + ": " + e.what());
        }
      }
    }
  }
}

void minimality_suite(const SuiteOptions& o, std::mt19937_64& rng, Recorder& rec) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), lam(0.0, 1.0);
  for (std::size_t p = 3; p <= kEnumerationLimit; ++p)
    for (std::size_t t = 0; t < 5 * std::max<std::size_t>(1, o.instances); ++t) {
      SymMatrix x(p);
      for (double& a : x.packed()) a = u(rng);
      const double l = lam(rng);
      rec.trial("minimality", "slc.unique_minimizer", check_minimality_slc(x, l), describe(p, l));
    }
}

void orbitope_suite(const SuiteOptions& o, std::mt19937_64& rng, Recorder& rec) {
  const std::string suite = "orbitope";
  // Every binary unit-diagonal 4x4 matrix.
  for (std::size_t bits = 0; bits < 64; ++bits) {
    SymMatrix b = SymMatrix::identity(4);
    std::size_t e = 0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j, ++e) b(i, j) = ((bits >> e) & 1U) ? 1.0 : 0.0;
    rec.trial(suite, "ultrametric_psd", ultrametric_psd_agree(b), "p=4 pattern " + std::to_string(bits));
  }
  std::bernoulli_distribution coin(0.5);
  for (std::size_t t = 0; t < 10 * std::max<std::size_t>(1, o.instances); ++t) {
    SymMatrix b = SymMatrix::identity(6);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = i + 1; j < 6; ++j) b(i, j) = coin(rng) ? 1.0 : 0.0;
    rec.trial(suite, "ultrametric_psd", ultrametric_psd_agree(b), "p=6 random");
  }
  for (std::size_t p = 2; p <= 6; ++p)
    for (std::size_t t = 0; t < std::max<std::size_t>(1, o.instances); ++t) {
      const SymMatrix s = random_correlation(rng, p);
      rec.trial(suite, "arcsin_in_cut", cut_membership(arcsin_map(s)), describe(p, std::nullopt));
      // A single-linkage mask lies in the cut polytope, so B o U is in U's orbitope.
      const SymMatrix b = slc(abs(s), 0.5);
      rec.trial(suite, "slc_mask_majorized", conj_majorizes(s, hadamard(b, s)), describe(p, 0.5));
    }
}

// Drops one entry the reduction needed. Returns nullopt if there is none.
std::optional<MaskProjection> corrupt(const EstimatorSpec& spec, const Input& x) {
  ReducedProblem red = reduce_input(spec.penalty, spec.group(), x);
  if (auto* d = std::get_if<Vector>(&red.mask)) {
    for (double& v : *d)
      if (v == 1.0) {
        v = 0.0;
        return red.mask;
      }
    return std::nullopt;
  }
  SymMatrix b = std::get<SymMatrix>(red.mask);
  const auto& xm = std::get<SymMatrix>(x);
  const bool positivity = spec.penalty.kind == PenaltyKind::OffDiagPositivity;
  const double lam = positivity ? 0.0 : spec.penalty.scalar();
  for (std::size_t i = 0; i < b.dim(); ++i)
    for (std::size_t j = i + 1; j < b.dim(); ++j) {
      const double v = positivity ? xm(i, j) : std::abs(xm(i, j));
      if (b(i, j) == 1.0 && v > lam) {
        b(i, j) = 0.0;
        return b;
      }
    }
  return std::nullopt;
}

void corrupted_suite(const SuiteOptions& o, std::mt19937_64& rng, Recorder& rec) {
  for (Family f : o.families) {
    if (f == Family::NNLS) continue;
    const std::string name = to_string(f);
    for (std::size_t p : o.sizes) {
      if (f == Family::IsingPMLE && p > kIsingSuiteLimit) continue;
      for (const Trial& t : make_trials(f, p, o, rng)) {
        const auto bad = corrupt(t.spec, t.x);
        if (!bad) continue;
        const std::string where = describe(dim_of(t.x), lambda_of(t.spec));
        const SufficiencyReport r = check_sufficiency(t.spec, t.x, kEqualityTol, bad);
        const bool detected = !r.pass && !r.conditions.dual_feasibility;
        rec.observe("corrupted.undetected", detected ? 0.0 : 1.0);
        rec.trial("corrupted", detected ? "detected" : "undetected", false, name + " " + where);
      }
    }
  }
}

} // namespace

SuiteSummary run_suite(const SuiteOptions& o) {
  SuiteSummary summary;
  Recorder rec(summary);
  const std::set<std::string> known{"sufficiency", "minimality", "orbitope", "corrupted"};
  for (const auto& s : o.suites)
    if (!known.count(s)) throw InvalidArgument("run_suite: unknown suite '" + s + "'");
  for (const auto& s : o.suites) {
    std::mt19937_64 rng(o.seed);
    const auto t0 = std::chrono::steady_clock::now();
    if (s == "sufficiency") sufficiency_suite(o, rng, rec);
    else if (s == "minimality") minimality_suite(o, rng, rec);
    else if (s == "orbitope") orbitope_suite(o, rng, rec);
    else corrupted_suite(o, rng, rec);
    if (o.record_timings)
      summary.timings[s] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return summary;
}

std::string to_json(const SuiteSummary& s) {
  nlohmann::json j;
  j["trials"] = s.trials;
  auto failures = nlohmann::json::array();
  for (const auto& f : s.failures)
    failures.push_back({{"suite", f.suite}, {"check", f.check}, {"detail", f.detail}, {"value", f.value}});
  j["failures"] = std::move(failures);
  j["worst"] = s.worst;
  if (!s.timings.empty()) j["timings"] = s.timings;
  return j.dump(2);
}

BenchResult bench_decomposition(std::size_t p, std::size_t blocks, double lambda, std::uint64_t seed,
                                std::size_t threads) {
  if (p == 0 || blocks == 0 || blocks > p) throw InvalidArgument("bench: need 1 <= blocks <= p");
  std::mt19937_64 rng(seed);
  InstanceOptions io;
  io.p = p;
  io.blocks = blocks;
  SymMatrix x = random_covariance(rng, io);
  // Planted independence: cross-block sample covariance shrunk tenfold.
  std::vector<std::size_t> labels(p);
  for (std::size_t j = 0; j < p; ++j) labels[j] = j * blocks / p;
  const Partition planted = Partition::from_labels(labels);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (!planted.same_block(i, j)) x(i, j) *= 0.1;

  BenchResult r;
  r.p = p;
  r.planted_blocks = blocks;
  r.lambda = lambda > 0.0 ? lambda : separating_lambda(x, planted);
  r.found_blocks = threshold_components(x, r.lambda).block_count();
  const EstimatorSpec spec = EstimatorSpec::graphical_lasso(r.lambda);
  const SolveReport direct = solve(spec, x);
  const SolveReport split = solve_decomposed(spec, x, threads);
  r.direct_seconds = direct.wall_seconds;
  r.decomposed_seconds = split.wall_seconds;
  r.speedup = split.wall_seconds > 0.0 ? direct.wall_seconds / split.wall_seconds : kInf;
  r.deviation = max_abs_diff(direct.matrix(), split.matrix());
  r.direct_converged = direct.converged;
  r.decomposed_converged = split.converged;
  return r;
}

std::string to_json(const BenchResult& r) {
  nlohmann::json j;
  j["estimator"] = "glasso";
  j["p"] = r.p;
  j["planted_blocks"] = r.planted_blocks;
  j["found_blocks"] = r.found_blocks;
  j["lambda"] = r.lambda;
  j["direct_seconds"] = r.direct_seconds;
  j["decomposed_seconds"] = r.decomposed_seconds;
  j["speedup"] = std::isfinite(r.speedup) ? nlohmann::json(r.speedup) : nlohmann::json(nullptr);
  j["deviation"] = r.deviation;
  j["direct_converged"] = r.direct_converged;
  j["decomposed_converged"] = r.decomposed_converged;
  return j.dump(2);
}

} // namespace suffreduce
