#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "suffreduce/problem.hpp"
#include "suffreduce/symmat.hpp"

namespace suffreduce {

inline constexpr std::size_t kIsingLimit = 15;
inline constexpr double kSupportTol = 1e-8;

enum class Family {
  Lasso,
  NNLS,
  GraphicalLasso,
  FantopeSPCA,
  SparseCovariance,
  PositiveInvCov,
  IsingPMLE,
};

/// Short names used on the command line: lasso, nnls, glasso, fps,
/// sparse_cov, posinvcov, ising.
std::string to_string(Family f);
std::optional<Family> family_from_string(std::string_view name);

struct SolverOptions {
  double tol = 1e-9;  ///< on the scaled KKT residual
  std::size_t max_iter = 10000;
  double rho = 1.0;   ///< initial ADMM step
};

struct EstimatorSpec {
  Family family = Family::Lasso;
  PenaltySpec penalty;
  std::size_t k = 1;   ///< FantopeSPCA
  double eps = 0.01;   ///< SparseCovariance eigenvalue floor
  SolverOptions options;

  static EstimatorSpec lasso(double lambda);
  static EstimatorSpec lasso(PenaltySpec penalty);
  static EstimatorSpec nnls();
  /// Diagonal unpenalized unless asked otherwise.
  static EstimatorSpec graphical_lasso(double lambda, bool penalize_diagonal = false);
  static EstimatorSpec fantope_spca(double lambda, std::size_t k);
  static EstimatorSpec sparse_covariance(double lambda, double eps);
  static EstimatorSpec positive_invcov();
  static EstimatorSpec ising(double lambda);

  Group group() const;
  bool symmetric() const { return group() == Group::DiagonalConjugation; }

  /// Throws InvalidArgument when the penalty kind does not belong to the
  /// family or a family parameter is out of range.
  void validate() const;
};

struct BlockTiming {
  std::vector<std::size_t> indices;
  double seconds = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double kkt_residual = 0.0;
};

struct SolveReport {
  Input theta;
  std::optional<Input> dual;  ///< element of C certifying optimality, when the solver has one
  double objective = 0.0;
  /// KKT residual divided by max(1, max|x|). converged implies it is <= tol.
  double kkt_residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  MaskProjection support;            ///< |theta| > kSupportTol * max|theta|
  std::vector<BlockTiming> blocks;   ///< solve_decomposed only
  double wall_seconds = 0.0;
  std::vector<double> objective_trace;  ///< per iteration, IsingPMLE only

  const SymMatrix& matrix() const { return std::get<SymMatrix>(theta); }
  const Vector& vector() const { return std::get<Vector>(theta); }
};

/// Entrywise soft threshold sign(x_i) max(|x_i| - lambda_i, 0).
Vector lasso(std::span<const double> x, std::span<const double> lambda);

/// Blockwise shrinkage (1 - lambda_B / ||x_B||)_+ x_B.
Vector group_lasso(std::span<const double> x, const Partition& blocks,
                   std::span<const double> lambda);

Vector nnls(std::span<const double> x);

/// min -log det(theta) + <X, theta> + sum_ij Lambda_ij |theta_ij|.
/// Throws NoSolution when Lambda is zero and X is singular, or when an
/// unpenalized diagonal entry of X is not positive.
SolveReport glasso(const SymMatrix& x, const SymMatrix& lambda, const SolverOptions& opts = {});

/// Frobenius projection onto {0 <= theta <= I, tr theta = k}.
SymMatrix fantope_project(const SymMatrix& w, std::size_t k);

/// max <X, theta> - lambda ||theta||_1 over the Fantope. The reported
/// objective is this maximized value.
SolveReport fantope_spca(const SymMatrix& x, double lambda, std::size_t k,
                         const SolverOptions& opts = {});
SolveReport fantope_spca(const SymMatrix& x, const SymMatrix& lambda, std::size_t k,
                         const SolverOptions& opts = {});

/// min 1/2 ||X - theta||^2 + lambda ||theta||_1 subject to theta >= eps I.
SolveReport sparse_cov(const SymMatrix& x, double lambda, double eps,
                       const SolverOptions& opts = {});
SolveReport sparse_cov(const SymMatrix& x, const SymMatrix& lambda, double eps,
                       const SolverOptions& opts = {});

/// min -log det(Omega) + <X, Omega> subject to Omega_ij <= 0 for i != j.
SolveReport positive_invcov(const SymMatrix& x, const SolverOptions& opts = {});

struct LogPartition {
  double value = 0.0;
  SymMatrix moment;  ///< E[u u^T], the gradient of A in the trace inner product
};

/// A(theta) = log sum_{u in {-1,1}^p} exp(<u u^T, theta>), by enumeration.
/// Throws LimitExceeded when p > kIsingLimit.
LogPartition ising_logpartition(const SymMatrix& theta);

/// min A(theta) - <X, theta> + lambda ||theta||_1 over zero-diagonal theta,
/// by monotone proximal gradient.
SolveReport ising_pmle(const SymMatrix& x, double lambda, const SolverOptions& opts = {});
SolveReport ising_pmle(const SymMatrix& x, const SymMatrix& lambda,
                       const SolverOptions& opts = {});

/// Objective of the family at theta for input x, in the orientation each
/// solver reports. IsingPMLE sums over the components of theta's support,
/// so only those components need to fit under kIsingLimit.
double objective(const EstimatorSpec& spec, const Input& x, const Input& theta);

SolveReport solve(const EstimatorSpec& spec, const Input& x);

/// Solves each block of the family's reduction separately and reassembles
/// with exact zeros off-block. FantopeSPCA is solved whole on the reduced
/// input. threads = 0 reads SUFFREDUCE_THREADS, falling back to the
/// hardware concurrency.
SolveReport solve_decomposed(const EstimatorSpec& spec, const SymMatrix& x,
                             std::size_t threads = 0);

} // namespace suffreduce
