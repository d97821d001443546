#include "suffreduce/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "feasibility.hpp"
#include "suffreduce/error.hpp"
#include "suffreduce/linkage.hpp"

namespace suffreduce {

bool sign_majorizes(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw InvalidArgument("sign_majorizes: length mismatch");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0.0) {
      if (v[i] != 0.0) return false;
    } else if (std::abs(v[i]) > std::abs(u[i])) {
      return false;
    }
  }
  return true;
}

namespace {

// Pairs (i<j) that carry a moment constraint, plus their target values.
struct MomentTargets {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  Vector values;
};

bool cut_feasible(std::size_t p, const MomentTargets& targets) {
  if (p <= 1) return true;
  const std::size_t vertices = std::size_t{1} << (p - 1);
  const std::size_t m = targets.pairs.size() + 1;
  Matrix a(m, vertices);
  Vector b(m);
  // Vertex y has y_0 = +1 and y_k = -1 iff bit (k-1) of the vertex index is set.
  auto sign = [](std::size_t vertex, std::size_t k) {
    return k == 0 ? 1.0 : (((vertex >> (k - 1)) & 1U) ? -1.0 : 1.0);
  };
  for (std::size_t r = 0; r < targets.pairs.size(); ++r) {
    const auto [i, j] = targets.pairs[r];
    for (std::size_t y = 0; y < vertices; ++y) a(r, y) = sign(y, i) * sign(y, j);
    b[r] = targets.values[r];
  }
  for (std::size_t y = 0; y < vertices; ++y) a(m - 1, y) = 1.0;
  b[m - 1] = 1.0;
  return detail::nonnegative_solution(a, b, kCutFeasibilityTol).feasible;
}

void check_limit(std::size_t p, std::size_t p_limit, const char* what) {
  if (p > p_limit)
    throw LimitExceeded(std::string(what) + ": dimension " + std::to_string(p) +
                        " exceeds limit " + std::to_string(p_limit));
}

} // namespace

bool cut_membership(const SymMatrix& b, std::size_t p_limit) {
  const std::size_t p = b.dim();
  check_limit(p, p_limit, "cut_membership");
  for (std::size_t i = 0; i < p; ++i)
    if (std::abs(b(i, i) - 1.0) > 1e-12) throw InvalidArgument("cut_membership: diagonal must be 1");
  MomentTargets t;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      if (std::abs(b(i, j)) > 1.0 + kCutFeasibilityTol) return false;
      t.pairs.emplace_back(i, j);
      t.values.push_back(b(i, j));
    }
  return cut_feasible(p, t);
}

bool conj_majorizes(const SymMatrix& u, const SymMatrix& v, std::size_t p_limit) {
  if (u.dim() != v.dim()) throw InvalidArgument("conj_majorizes: dimension mismatch");
  const std::size_t p = u.dim();
  check_limit(p, p_limit, "conj_majorizes");
  // B has unit diagonal, so the diagonal of V must match U exactly.
  for (std::size_t i = 0; i < p; ++i)
    if (std::abs(v(i, i) - u(i, i)) > kCutFeasibilityTol * (1.0 + std::abs(u(i, i)))) return false;
  MomentTargets t;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      if (u(i, j) == 0.0) {
        if (v(i, j) != 0.0) return false;
        continue;
      }
      const double ratio = v(i, j) / u(i, j);
      if (std::abs(ratio) > 1.0 + kCutFeasibilityTol) return false;
      t.pairs.emplace_back(i, j);
      t.values.push_back(ratio);
    }
  return cut_feasible(p, t);
}

SymMatrix arcsin_map(const SymMatrix& sigma) {
  const std::size_t p = sigma.dim();
  for (std::size_t i = 0; i < p; ++i)
    if (std::abs(sigma(i, i) - 1.0) > 1e-12) throw InvalidArgument("arcsin_map: diagonal must be 1");
  for (double x : sigma.packed())
    if (!(std::abs(x) <= 1.0)) throw InvalidArgument("arcsin_map: entries must lie in [-1, 1]");
  if (p > 0 && min_eigenvalue(sigma) < -1e-10)
    throw InvalidArgument("arcsin_map: input is not positive semidefinite");
  SymMatrix out = sigma.map([](double x) { return (2.0 / std::numbers::pi) * std::asin(x); });
  for (std::size_t i = 0; i < p; ++i) out(i, i) = 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// Projection conditions

namespace {

bool binary_entry(double d) { return d == 0.0 || d == 1.0; }

ConditionReport vector_conditions(const Vector& d, const Vector& x, const PenaltySpec& penalty) {
  if (d.size() != x.size()) throw InvalidArgument("check_projection_conditions: mask/input length mismatch");
  const std::size_t n = x.size();
  ConditionReport r;
  r.averaging = std::all_of(d.begin(), d.end(), binary_entry);
  r.dual_feasibility = true;
  r.dual_invariance = true;

  switch (penalty.kind) {
    case PenaltyKind::EntrywiseL1: {
      const Vector lam = penalty.coordinate_weights(n);
      for (std::size_t i = 0; i < n; ++i) {
        // sup over |z| <= lam of |(1-d)x + d z| must stay within lam
        if (std::abs(1.0 - d[i]) * std::abs(x[i]) + std::abs(d[i]) * lam[i] > lam[i])
          r.dual_feasibility = false;
        if (lam[i] > 0.0 && std::abs(d[i]) > 1.0) r.dual_invariance = false;
      }
      break;
    }
    case PenaltyKind::GroupL2: {
      if (penalty.blocks.size() != n)
        throw InvalidArgument("check_projection_conditions: blocks do not match input length");
      const Vector lam = penalty.block_weights();
      for (std::size_t bi = 0; bi < penalty.blocks.block_count(); ++bi) {
        const auto& block = penalty.blocks.blocks()[bi];
        bool any_kept = false, all_binary = true;
        double dropped2 = 0.0, all2 = 0.0, dmax = 0.0;
        for (std::size_t i : block) {
          all_binary = all_binary && binary_entry(d[i]);
          dmax = std::max(dmax, std::abs(d[i]));
          all2 += x[i] * x[i];
          if (d[i] == 1.0) any_kept = true;
          else dropped2 += x[i] * x[i];
        }
        if (!all_binary) r.dual_feasibility = false;
        else if (!any_kept && std::sqrt(all2) > lam[bi]) r.dual_feasibility = false;
        else if (any_kept && dropped2 > 0.0) r.dual_feasibility = false;
        if (lam[bi] > 0.0 && dmax > 1.0) r.dual_invariance = false;
      }
      break;
    }
    case PenaltyKind::PositiveCone:
      for (std::size_t i = 0; i < n; ++i) {
        if (d[i] < 0.0 || (1.0 - d[i]) * x[i] > 0.0) r.dual_feasibility = false;
        if (d[i] < 0.0) r.dual_invariance = false;
      }
      break;
    default:
      throw InvalidArgument("check_projection_conditions: penalty " + to_string(penalty.kind) +
                            " is not defined for group SignFlipVector");
  }
  return r;
}

ConditionReport matrix_conditions(const SymMatrix& b, const SymMatrix& x, const PenaltySpec& penalty) {
  if (b.dim() != x.dim()) throw InvalidArgument("check_projection_conditions: mask/input dimension mismatch");
  const std::size_t p = x.dim();
  ConditionReport r;
  bool unit_diag = true;
  for (std::size_t i = 0; i < p; ++i) unit_diag = unit_diag && b(i, i) == 1.0;
  r.averaging = is_binary(b) && unit_diag && is_binary_ultrametric(b);
  r.dual_feasibility = true;
  r.dual_invariance = true;

  switch (penalty.kind) {
    case PenaltyKind::SymmetricL1: {
      const SymMatrix lam = penalty.weight_matrix(p);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
          const double bij = b(i, j);
          if (std::abs(1.0 - bij) * std::abs(x(i, j)) + std::abs(bij) * lam(i, j) > lam(i, j))
            r.dual_feasibility = false;
          if (lam(i, j) > 0.0 && std::abs(bij) > 1.0) r.dual_invariance = false;
        }
      break;
    }
    case PenaltyKind::OffDiagPositivity:
      for (std::size_t i = 0; i < p; ++i) {
        if (b(i, i) != 1.0 && x(i, i) != 0.0) r.dual_feasibility = false;
        for (std::size_t j = i + 1; j < p; ++j) {
          const double bij = b(i, j);
          if (bij < 0.0 || (1.0 - bij) * x(i, j) > 0.0) r.dual_feasibility = false;
          if (bij < 0.0) r.dual_invariance = false;
        }
      }
      break;
    default:
      throw InvalidArgument("check_projection_conditions: penalty " + to_string(penalty.kind) +
                            " is not defined for group DiagonalConjugation");
  }
  return r;
}

} // namespace

ConditionReport check_projection_conditions(const MaskProjection& mask, const Input& x,
                                            const PenaltySpec& penalty, Group group) {
  penalty.validate();
  if (group == Group::SignFlipVector) {
    const auto* d = std::get_if<Vector>(&mask);
    const auto* xv = std::get_if<Vector>(&x);
    if (!d || !xv) throw InvalidArgument("check_projection_conditions: SignFlipVector acts on vectors");
    return vector_conditions(*d, *xv, penalty);
  }
  const auto* b = std::get_if<SymMatrix>(&mask);
  const auto* xm = std::get_if<SymMatrix>(&x);
  if (!b || !xm)
    throw InvalidArgument("check_projection_conditions: DiagonalConjugation acts on symmetric matrices");
  return matrix_conditions(*b, *xm, penalty);
}

} // namespace suffreduce
