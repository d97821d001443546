#include "suffreduce/reduce.hpp"

#include <cmath>

#include "suffreduce/error.hpp"

namespace suffreduce {

namespace {
void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw InvalidArgument(std::string(what) + ": length mismatch");
}
} // namespace

Vector hard_threshold(std::span<const double> x, std::span<const double> lambda) {
  require_same_length(x.size(), lambda.size(), "hard_threshold");
  Vector out(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) > lambda[i]) out[i] = x[i];
  return out;
}

Vector group_hard_threshold(std::span<const double> x, const Partition& blocks,
                            std::span<const double> lambda) {
  if (blocks.size() != x.size())
    throw InvalidArgument("group_hard_threshold: blocks do not partition the coordinates");
  if (blocks.block_count() != lambda.size())
    throw InvalidArgument("group_hard_threshold: block/weight count mismatch");
  Vector out(x.size(), 0.0);
  for (std::size_t b = 0; b < blocks.block_count(); ++b) {
    double norm2 = 0.0;
    for (std::size_t i : blocks.blocks()[b]) norm2 += x[i] * x[i];
    if (std::sqrt(norm2) > lambda[b])
      for (std::size_t i : blocks.blocks()[b]) out[i] = x[i];
  }
  return out;
}

Vector positive_part(std::span<const double> x) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::max(x[i], 0.0);
  return out;
}

Vector reconstruct_from_soft(std::span<const double> t, std::span<const double> lambda) {
  require_same_length(t.size(), lambda.size(), "reconstruct_from_soft");
  Vector out(t.size(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > 0.0) out[i] = t[i] + lambda[i];
    else if (t[i] < 0.0) out[i] = t[i] - lambda[i];
  }
  return out;
}

namespace {

ReducedProblem reduce_vector(const PenaltySpec& penalty, const Vector& x) {
  ReducedProblem r;
  switch (penalty.kind) {
    case PenaltyKind::EntrywiseL1: {
      const Vector lam = penalty.coordinate_weights(x.size());
      Vector d(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) d[i] = std::abs(x[i]) > lam[i] ? 1.0 : 0.0;
      r.reduced = hard_threshold(x, lam);
      r.mask = std::move(d);
      return r;
    }
    case PenaltyKind::GroupL2: {
      const Vector lam = penalty.block_weights();
      if (penalty.blocks.size() != x.size())
        throw InvalidArgument("reduce_input: GroupL2 blocks do not match input length");
      Vector d(x.size(), 0.0);
      for (std::size_t b = 0; b < penalty.blocks.block_count(); ++b) {
        double norm2 = 0.0;
        for (std::size_t i : penalty.blocks.blocks()[b]) norm2 += x[i] * x[i];
        if (std::sqrt(norm2) > lam[b])
          for (std::size_t i : penalty.blocks.blocks()[b]) d[i] = 1.0;
      }
      r.reduced = group_hard_threshold(x, penalty.blocks, lam);
      r.mask = std::move(d);
      return r;
    }
    case PenaltyKind::PositiveCone: {
      Vector d(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] > 0.0 ? 1.0 : 0.0;
      r.reduced = positive_part(x);
      r.mask = std::move(d);
      return r;
    }
    default:
      throw InvalidArgument("reduce_input: penalty " + to_string(penalty.kind) +
                            " has no reduction under SignFlipVector");
  }
}

ReducedProblem reduce_matrix(const PenaltySpec& penalty, const SymMatrix& x) {
  ReducedProblem r;
  switch (penalty.kind) {
    case PenaltyKind::SymmetricL1: {
      if (!penalty.scalar_weight())
        throw InvalidArgument(
            "reduce_input: SymmetricL1 reduction is defined for a scalar lambda only");
      const double lambda = penalty.scalar();
      r.partition = threshold_components(x, lambda);
      SymMatrix mask = r.partition.cluster_matrix();
      r.reduced = hadamard(mask, x);
      r.mask = std::move(mask);
      return r;
    }
    case PenaltyKind::OffDiagPositivity: {
      r.partition = components_above(x, 0.0);
      SymMatrix mask = r.partition.cluster_matrix();
      r.reduced = hadamard(mask, x);
      r.mask = std::move(mask);
      return r;
    }
    default:
      throw InvalidArgument("reduce_input: penalty " + to_string(penalty.kind) +
                            " has no reduction under DiagonalConjugation");
  }
}

} // namespace

ReducedProblem reduce_input(const PenaltySpec& penalty, Group group, const Input& x) {
  penalty.validate();
  if (group == Group::SignFlipVector) {
    const auto* v = std::get_if<Vector>(&x);
    if (!v) throw InvalidArgument("reduce_input: SignFlipVector reductions take a vector input");
    return reduce_vector(penalty, *v);
  }
  const auto* m = std::get_if<SymMatrix>(&x);
  if (!m) throw InvalidArgument("reduce_input: DiagonalConjugation reductions take a matrix input");
  return reduce_matrix(penalty, *m);
}

std::vector<MatrixBlock> decompose_blocks(const SymMatrix& x, const Partition& partition) {
  if (partition.size() != x.dim())
    throw InvalidArgument("decompose_blocks: partition does not cover the matrix indices");
  std::vector<MatrixBlock> out;
  out.reserve(partition.block_count());
  for (const auto& block : partition.blocks()) out.push_back({block, x.principal(block)});
  return out;
}

SymMatrix reassemble_blocks(const std::vector<MatrixBlock>& blocks, std::size_t p) {
  SymMatrix out(p);
  for (const auto& blk : blocks) {
    if (blk.values.dim() != blk.indices.size())
      throw InvalidArgument("reassemble_blocks: block values do not match its index list");
    for (std::size_t a = 0; a < blk.indices.size(); ++a)
      for (std::size_t b = a; b < blk.indices.size(); ++b) {
        if (blk.indices[a] >= p || blk.indices[b] >= p)
          throw InvalidArgument("reassemble_blocks: index out of range");
        out(blk.indices[a], blk.indices[b]) = blk.values(a, b);
      }
  }
  return out;
}

} // namespace suffreduce
