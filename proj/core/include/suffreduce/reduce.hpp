#pragma once

#include <span>
#include <vector>

#include "suffreduce/linkage.hpp"
#include "suffreduce/problem.hpp"
#include "suffreduce/symmat.hpp"

namespace suffreduce {

/// x_i if |x_i| > lambda_i, else 0.
Vector hard_threshold(std::span<const double> x, std::span<const double> lambda);

/// Keeps block B iff ||x_B||_2 > lambda_B, otherwise zeroes it.
Vector group_hard_threshold(std::span<const double> x, const Partition& blocks,
                            std::span<const double> lambda);

/// max(x_i, 0).
Vector positive_part(std::span<const double> x);

/// Inverts soft thresholding on its support: t_i + lambda_i sign(t_i) where
/// t_i != 0, and 0 elsewhere. Recovers hard_threshold(x) from soft_threshold(x).
Vector reconstruct_from_soft(std::span<const double> t, std::span<const double> lambda);

struct ReducedProblem {
  Input reduced;        ///< mask o original input
  MaskProjection mask;  ///< d (vector) or B (symmetric, binary ultrametric)
  /// Components of the mask's off-diagonal support. Symmetric cases only;
  /// empty for vector inputs.
  Partition partition;
};

/// Builds the tight reduction for a supported (penalty, group) pair:
///   EntrywiseL1       x SignFlipVector      -> hard_threshold
///   GroupL2           x SignFlipVector      -> group_hard_threshold
///   PositiveCone      x SignFlipVector      -> positive_part
///   SymmetricL1       x DiagonalConjugation -> slt with mask slc(|X|, lambda)
///   OffDiagPositivity x DiagonalConjugation -> slt_plus with mask slc(X, 0)
/// SymmetricL1 needs a scalar weight; a full weight matrix is rejected.
ReducedProblem reduce_input(const PenaltySpec& penalty, Group group, const Input& x);

struct MatrixBlock {
  std::vector<std::size_t> indices;
  SymMatrix values;  ///< principal submatrix on `indices`
};

/// Principal submatrices on each block of the partition, in block order.
std::vector<MatrixBlock> decompose_blocks(const SymMatrix& x, const Partition& partition);

/// Inverse of decompose_blocks: block values in place, exact zeros elsewhere.
SymMatrix reassemble_blocks(const std::vector<MatrixBlock>& blocks, std::size_t p);

} // namespace suffreduce
