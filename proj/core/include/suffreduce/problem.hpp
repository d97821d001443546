#pragma once

#include <string>
#include <variant>

#include "suffreduce/linkage.hpp"
#include "suffreduce/symmat.hpp"

namespace suffreduce {

/// Estimator input: a vector (R^n problems) or a symmetric matrix (Sym_p problems).
using Input = std::variant<Vector, SymMatrix>;

/// Entrywise mask d (vector case) or B (symmetric case) defining Q u = d o u.
using MaskProjection = std::variant<Vector, SymMatrix>;

enum class Group {
  SignFlipVector,       ///< coordinate sign flips acting on R^n
  DiagonalConjugation,  ///< D theta D^{-1} for diagonal sign matrices D acting on Sym_p
};

enum class PenaltyKind {
  EntrywiseL1,        ///< C = {|z_i| <= lambda_i}
  GroupL2,            ///< C = {||z_B|| <= lambda_B for every block B}
  PositiveCone,       ///< C = {z <= 0}, i.e. theta >= 0
  SymmetricL1,        ///< C = {|Z_ij| <= Lambda_ij}
  OffDiagPositivity,  ///< C = {Z_ii = 0, Z_ij <= 0}
};

std::string to_string(Group g);
std::string to_string(PenaltyKind k);

/// Penalty support set descriptor. Weights are a scalar, a per-coordinate or
/// per-block vector, or a symmetric weight matrix depending on the kind.
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::EntrywiseL1;
  std::variant<double, Vector, SymMatrix> weights = 0.0;
  Partition blocks;  ///< GroupL2 only
  /// SymmetricL1 with a scalar weight: whether Lambda_ii = lambda or 0.
  bool penalize_diagonal = true;

  static PenaltySpec entrywise_l1(double lambda);
  static PenaltySpec entrywise_l1(Vector lambdas);
  static PenaltySpec group_l2(Partition blocks, Vector lambdas);
  static PenaltySpec positive_cone();
  static PenaltySpec symmetric_l1(double lambda, bool penalize_diagonal = true);
  static PenaltySpec symmetric_l1(SymMatrix lambdas);
  static PenaltySpec offdiag_positivity();

  /// Throws InvalidArgument on negative/non-finite weights or malformed blocks.
  void validate() const;

  bool scalar_weight() const { return std::holds_alternative<double>(weights); }
  double scalar() const;

  /// Per-coordinate weights for EntrywiseL1 (scalar broadcast to n).
  Vector coordinate_weights(std::size_t n) const;
  /// Per-block weights for GroupL2.
  Vector block_weights() const;
  /// Lambda matrix for SymmetricL1 (scalar expanded with the diagonal rule).
  SymMatrix weight_matrix(std::size_t p) const;
};

} // namespace suffreduce
