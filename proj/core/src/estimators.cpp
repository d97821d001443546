#include "suffreduce/estimators.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>

#include "admm.hpp"
#include "suffreduce/error.hpp"

namespace suffreduce {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 7> kFamilyNames{{
    {Family::Lasso, "lasso"},
    {Family::NNLS, "nnls"},
    {Family::GraphicalLasso, "glasso"},
    {Family::FantopeSPCA, "fps"},
    {Family::SparseCovariance, "sparse_cov"},
    {Family::PositiveInvCov, "posinvcov"},
    {Family::IsingPMLE, "ising"},
}};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double half_sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return 0.5 * s;
}

} // namespace

std::string to_string(Family f) {
  for (const auto& [fam, name] : kFamilyNames)
    if (fam == f) return std::string(name);
  return "unknown";
}

std::optional<Family> family_from_string(std::string_view name) {
  for (const auto& [fam, n] : kFamilyNames)
    if (n == name) return fam;
  return std::nullopt;
}

EstimatorSpec EstimatorSpec::lasso(double lambda) { return lasso(PenaltySpec::entrywise_l1(lambda)); }

EstimatorSpec EstimatorSpec::lasso(PenaltySpec penalty) {
  EstimatorSpec s;
  s.family = Family::Lasso;
  s.penalty = std::move(penalty);
  return s;
}

EstimatorSpec EstimatorSpec::nnls() {
  EstimatorSpec s;
  s.family = Family::NNLS;
  s.penalty = PenaltySpec::positive_cone();
  return s;
}

EstimatorSpec EstimatorSpec::graphical_lasso(double lambda, bool penalize_diagonal) {
  EstimatorSpec s;
  s.family = Family::GraphicalLasso;
  s.penalty = PenaltySpec::symmetric_l1(lambda, penalize_diagonal);
  return s;
}

EstimatorSpec EstimatorSpec::fantope_spca(double lambda, std::size_t k) {
  EstimatorSpec s;
  s.family = Family::FantopeSPCA;
  s.penalty = PenaltySpec::symmetric_l1(lambda, true);
  s.k = k;
  return s;
}

EstimatorSpec EstimatorSpec::sparse_covariance(double lambda, double eps) {
  EstimatorSpec s;
  s.family = Family::SparseCovariance;
  s.penalty = PenaltySpec::symmetric_l1(lambda, true);
  s.eps = eps;
  return s;
}

EstimatorSpec EstimatorSpec::positive_invcov() {
  EstimatorSpec s;
  s.family = Family::PositiveInvCov;
  s.penalty = PenaltySpec::offdiag_positivity();
  return s;
}

EstimatorSpec EstimatorSpec::ising(double lambda) {
  EstimatorSpec s;
  s.family = Family::IsingPMLE;
  s.penalty = PenaltySpec::symmetric_l1(lambda, false);
  return s;
}

Group EstimatorSpec::group() const {
  return family == Family::Lasso || family == Family::NNLS ? Group::SignFlipVector
                                                           : Group::DiagonalConjugation;
}

void EstimatorSpec::validate() const {
  penalty.validate();
  const PenaltyKind k0 = penalty.kind;
  bool ok = false;
  switch (family) {
    case Family::Lasso: ok = k0 == PenaltyKind::EntrywiseL1 || k0 == PenaltyKind::GroupL2; break;
    case Family::NNLS: ok = k0 == PenaltyKind::PositiveCone; break;
    case Family::PositiveInvCov: ok = k0 == PenaltyKind::OffDiagPositivity; break;
    default: ok = k0 == PenaltyKind::SymmetricL1; break;
  }
  if (!ok)
    throw InvalidArgument("estimator " + to_string(family) + " does not take penalty " + to_string(k0));
  if (family == Family::FantopeSPCA && k < 1) throw InvalidArgument("fps: k must be at least 1");
  if (family == Family::SparseCovariance && !(eps > 0.0 && std::isfinite(eps)))
    throw InvalidArgument("sparse_cov: eps must be positive");
  if (!(options.tol > 0.0) || !(options.rho > 0.0) || options.max_iter == 0)
    throw InvalidArgument("solver options: tol, rho and max_iter must be positive");
}

Vector lasso(std::span<const double> x, std::span<const double> lambda) {
  if (x.size() != lambda.size()) throw InvalidArgument("lasso: length mismatch");
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double m = std::abs(x[i]) - lambda[i];
    out[i] = m > 0.0 ? std::copysign(m, x[i]) : 0.0;
  }
  return out;
}

Vector group_lasso(std::span<const double> x, const Partition& blocks, std::span<const double> lambda) {
  if (blocks.size() != x.size() || blocks.block_count() != lambda.size())
    throw InvalidArgument("group_lasso: blocks and weights do not match the input");
  Vector out(x.size(), 0.0);
  for (std::size_t b = 0; b < blocks.block_count(); ++b) {
    double n2 = 0.0;
    for (std::size_t i : blocks.blocks()[b]) n2 += x[i] * x[i];
    const double norm = std::sqrt(n2);
    if (norm > lambda[b]) {
      const double shrink = 1.0 - lambda[b] / norm;
      for (std::size_t i : blocks.blocks()[b]) out[i] = shrink * x[i];
    }
  }
  return out;
}

Vector nnls(std::span<const double> x) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
  return out;
}

double objective(const EstimatorSpec& spec, const Input& x, const Input& theta) {
  if (!spec.symmetric()) {
    const auto& xv = std::get<Vector>(x);
    const auto& tv = std::get<Vector>(theta);
    if (xv.size() != tv.size()) throw InvalidArgument("objective: length mismatch");
    double obj = half_sq_dist(xv, tv);
    if (spec.family == Family::NNLS) {
      for (double t : tv)
        if (t < 0.0) return std::numeric_limits<double>::infinity();
      return obj;
    }
    if (spec.penalty.kind == PenaltyKind::GroupL2) {
      const Vector lam = spec.penalty.block_weights();
      for (std::size_t b = 0; b < spec.penalty.blocks.block_count(); ++b) {
        double n2 = 0.0;
        for (std::size_t i : spec.penalty.blocks.blocks()[b]) n2 += tv[i] * tv[i];
        obj += lam[b] * std::sqrt(n2);
      }
      return obj;
    }
    const Vector lam = spec.penalty.coordinate_weights(tv.size());
    for (std::size_t i = 0; i < tv.size(); ++i) obj += lam[i] * std::abs(tv[i]);
    return obj;
  }

  const auto& xm = std::get<SymMatrix>(x);
  const auto& tm = std::get<SymMatrix>(theta);
  if (xm.dim() != tm.dim()) throw InvalidArgument("objective: dimension mismatch");
  const std::size_t p = xm.dim();
  auto neg_logdet = [](const SymMatrix& t) {
    const auto ld = log_det_spd(t);
    return ld ? -*ld : std::numeric_limits<double>::infinity();
  };
  switch (spec.family) {
    case Family::GraphicalLasso:
      return neg_logdet(tm) + inner(xm, tm) + detail::weighted_l1(tm, spec.penalty.weight_matrix(p));
    case Family::PositiveInvCov:
      return neg_logdet(tm) + inner(xm, tm);
    case Family::FantopeSPCA:
      return inner(xm, tm) - detail::weighted_l1(tm, spec.penalty.weight_matrix(p));
    case Family::SparseCovariance: {
      const SymMatrix d = xm - tm;
      return 0.5 * inner(d, d) + detail::weighted_l1(tm, spec.penalty.weight_matrix(p));
    }
    case Family::IsingPMLE: {
      SymMatrix lam = spec.penalty.weight_matrix(p);
      for (std::size_t i = 0; i < p; ++i) lam(i, i) = 0.0;
      // A is additive over the components of a block-diagonal theta.
      double a = 0.0;
      const Partition comps = components_above(abs(tm), 0.0);
      for (const auto& block : comps.blocks())
        a += ising_logpartition(tm.principal(block)).value;
      return a - inner(xm, tm) + detail::weighted_l1(tm, lam);
    }
    default:
      throw InvalidArgument("objective: family is not a symmetric-matrix estimator");
  }
}

SolveReport solve(const EstimatorSpec& spec, const Input& x) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  if (!spec.symmetric()) {
    const auto* xv = std::get_if<Vector>(&x);
    if (!xv) throw InvalidArgument(to_string(spec.family) + " takes a vector input");
    Vector theta;
    if (spec.family == Family::NNLS) theta = nnls(*xv);
    else if (spec.penalty.kind == PenaltyKind::GroupL2)
      theta = group_lasso(*xv, spec.penalty.blocks, spec.penalty.block_weights());
    else theta = lasso(*xv, spec.penalty.coordinate_weights(xv->size()));
    Vector dual(xv->size());
    for (std::size_t i = 0; i < dual.size(); ++i) dual[i] = (*xv)[i] - theta[i];
    rep.converged = true;
    rep.dual = std::move(dual);
    rep.support = detail::support_of(theta);
    rep.theta = std::move(theta);
    rep.objective = objective(spec, x, rep.theta);
    rep.wall_seconds = seconds_since(t0);
    return rep;
  }

  const auto* xm = std::get_if<SymMatrix>(&x);
  if (!xm) throw InvalidArgument(to_string(spec.family) + " takes a symmetric matrix input");
  const std::size_t p = xm->dim();
  switch (spec.family) {
    case Family::GraphicalLasso:
      rep = glasso(*xm, spec.penalty.weight_matrix(p), spec.options);
      break;
    case Family::FantopeSPCA:
      rep = fantope_spca(*xm, spec.penalty.weight_matrix(p), spec.k, spec.options);
      break;
    case Family::SparseCovariance:
      rep = sparse_cov(*xm, spec.penalty.weight_matrix(p), spec.eps, spec.options);
      break;
    case Family::PositiveInvCov:
      rep = positive_invcov(*xm, spec.options);
      break;
    case Family::IsingPMLE:
      rep = ising_pmle(*xm, spec.penalty.weight_matrix(p), spec.options);
      break;
    default:
      throw InvalidArgument("solve: unknown family");
  }
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

} // namespace suffreduce
