#pragma once

#include <cstddef>
#include <span>

#include "suffreduce/problem.hpp"
#include "suffreduce/symmat.hpp"

namespace suffreduce {

inline constexpr std::size_t kDefaultCutLimit = 12;
inline constexpr double kCutFeasibilityTol = 1e-8;

/// v lies in the sign-flip orbitope of u: v = d o u with ||d||_inf <= 1.
/// Throws InvalidArgument on length mismatch.
bool sign_majorizes(std::span<const double> u, std::span<const double> v);

/// Membership of a unit-diagonal matrix in the cut polytope
/// conv{y y^T : y in {-1,+1}^p}, decided by a feasibility program over the
/// 2^(p-1) vertex weights (moment match within 1e-8). Throws LimitExceeded
/// when p > p_limit and InvalidArgument when the diagonal is not all ones.
bool cut_membership(const SymMatrix& b, std::size_t p_limit = kDefaultCutLimit);

/// V is in the diagonal-conjugation orbitope of U: V = B o U for some B in
/// the cut polytope. Entries where U is zero must be zero in V and leave
/// the matching entry of B free.
bool conj_majorizes(const SymMatrix& u, const SymMatrix& v,
                    std::size_t p_limit = kDefaultCutLimit);

/// Entrywise (2/pi) arcsin of a correlation matrix. Throws InvalidArgument
/// unless the diagonal is one, entries lie in [-1, 1] and the input is PSD
/// within 1e-10.
SymMatrix arcsin_map(const SymMatrix& sigma);

struct ConditionReport {
  bool averaging = false;
  bool dual_feasibility = false;
  bool dual_invariance = false;

  bool all() const { return averaging && dual_feasibility && dual_invariance; }
  bool operator==(const ConditionReport&) const = default;
};

/// Checks the three conditions under which Q u = mask o u reduces the input
/// without changing the masked solution set:
///   averaging        Q u lies in the group orbitope of u and Q is a projection
///   dual feasibility Q(x - C) is inside x - C
///   dual invariance  Q(x - C) is inside Q x - C, equivalently Q C inside C
/// Throws InvalidArgument for a penalty/group pair outside
/// {EntrywiseL1, GroupL2, PositiveCone} x SignFlipVector and
/// {SymmetricL1, OffDiagPositivity} x DiagonalConjugation, or on shape mismatch.
ConditionReport check_projection_conditions(const MaskProjection& mask, const Input& x,
                                            const PenaltySpec& penalty, Group group);

} // namespace suffreduce
