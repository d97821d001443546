#pragma once

#include "suffreduce/symmat.hpp"

namespace suffreduce::detail {

struct FeasibilityResult {
  bool feasible = false;
  Vector weights;         ///< a nonnegative w with A w ~= b when feasible
  double residual = 0.0;  ///< max_i |(A w - b)_i| for the returned w
};

/// Decides whether {w >= 0 : A w = b} is nonempty with a dense phase-I
/// simplex (Bland's rule, so it terminates on degenerate vertex sets).
/// Feasible iff the recovered w matches b to within `tol` in max norm.
FeasibilityResult nonnegative_solution(const Matrix& a, const Vector& b, double tol);

} // namespace suffreduce::detail
