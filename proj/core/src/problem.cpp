#include "suffreduce/problem.hpp"

#include <cmath>

#include "suffreduce/error.hpp"

namespace suffreduce {

std::string to_string(Group g) {
  switch (g) {
    case Group::SignFlipVector: return "SignFlipVector";
    case Group::DiagonalConjugation: return "DiagonalConjugation";
  }
  return "?";
}

std::string to_string(PenaltyKind k) {
  switch (k) {
    case PenaltyKind::EntrywiseL1: return "EntrywiseL1";
    case PenaltyKind::GroupL2: return "GroupL2";
    case PenaltyKind::PositiveCone: return "PositiveCone";
    case PenaltyKind::SymmetricL1: return "SymmetricL1";
    case PenaltyKind::OffDiagPositivity: return "OffDiagPositivity";
  }
  return "?";
}

PenaltySpec PenaltySpec::entrywise_l1(double lambda) {
  PenaltySpec s;
  s.kind = PenaltyKind::EntrywiseL1;
  s.weights = lambda;
  s.validate();
  return s;
}

PenaltySpec PenaltySpec::entrywise_l1(Vector lambdas) {
  PenaltySpec s;
  s.kind = PenaltyKind::EntrywiseL1;
  s.weights = std::move(lambdas);
  s.validate();
  return s;
}

PenaltySpec PenaltySpec::group_l2(Partition blocks, Vector lambdas) {
  PenaltySpec s;
  s.kind = PenaltyKind::GroupL2;
  s.blocks = std::move(blocks);
  s.weights = std::move(lambdas);
  s.validate();
  return s;
}

PenaltySpec PenaltySpec::positive_cone() {
  PenaltySpec s;
  s.kind = PenaltyKind::PositiveCone;
  return s;
}

PenaltySpec PenaltySpec::symmetric_l1(double lambda, bool penalize_diagonal) {
  PenaltySpec s;
  s.kind = PenaltyKind::SymmetricL1;
  s.weights = lambda;
  s.penalize_diagonal = penalize_diagonal;
  s.validate();
  return s;
}

PenaltySpec PenaltySpec::symmetric_l1(SymMatrix lambdas) {
  PenaltySpec s;
  s.kind = PenaltyKind::SymmetricL1;
  s.weights = std::move(lambdas);
  s.validate();
  return s;
}

PenaltySpec PenaltySpec::offdiag_positivity() {
  PenaltySpec s;
  s.kind = PenaltyKind::OffDiagPositivity;
  return s;
}

namespace {
void check_weight(double w) {
  if (!std::isfinite(w) || w < 0.0) throw InvalidArgument("penalty weights must be finite and >= 0");
}
} // namespace

void PenaltySpec::validate() const {
  if (const auto* s = std::get_if<double>(&weights)) check_weight(*s);
  if (const auto* v = std::get_if<Vector>(&weights))
    for (double w : *v) check_weight(w);
  if (const auto* m = std::get_if<SymMatrix>(&weights))
    for (double w : m->packed()) check_weight(w);

  switch (kind) {
    case PenaltyKind::GroupL2:
      if (!std::holds_alternative<Vector>(weights))
        throw InvalidArgument("GroupL2 penalty needs one weight per block");
      if (std::get<Vector>(weights).size() != blocks.block_count())
        throw InvalidArgument("GroupL2 penalty: block/weight count mismatch");
      break;
    case PenaltyKind::SymmetricL1:
      if (std::holds_alternative<Vector>(weights))
        throw InvalidArgument("SymmetricL1 penalty takes a scalar or a weight matrix");
      break;
    case PenaltyKind::EntrywiseL1:
      if (std::holds_alternative<SymMatrix>(weights))
        throw InvalidArgument("EntrywiseL1 penalty takes a scalar or a weight vector");
      break;
    case PenaltyKind::PositiveCone:
    case PenaltyKind::OffDiagPositivity: break;
  }
}

double PenaltySpec::scalar() const {
  if (!scalar_weight()) throw InvalidArgument("penalty weight is not a scalar");
  return std::get<double>(weights);
}

Vector PenaltySpec::coordinate_weights(std::size_t n) const {
  if (scalar_weight()) return Vector(n, std::get<double>(weights));
  const auto& v = std::get<Vector>(weights);
  if (v.size() != n) throw InvalidArgument("penalty: weight vector length mismatch");
  return v;
}

Vector PenaltySpec::block_weights() const { return std::get<Vector>(weights); }

SymMatrix PenaltySpec::weight_matrix(std::size_t p) const {
  if (const auto* m = std::get_if<SymMatrix>(&weights)) {
    if (m->dim() != p) throw InvalidArgument("penalty: weight matrix dimension mismatch");
    return *m;
  }
  SymMatrix out(p, scalar());
  if (!penalize_diagonal)
    for (std::size_t i = 0; i < p; ++i) out(i, i) = 0.0;
  return out;
}

} // namespace suffreduce
