#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "suffreduce/estimators.hpp"
#include "suffreduce/linkage.hpp"
#include "suffreduce/orbit.hpp"
#include "suffreduce/problem.hpp"

namespace suffreduce {

inline constexpr std::size_t kEnumerationLimit = 5;
inline constexpr double kEqualityTol = 1e-5;
inline constexpr double kContainmentTol = 1e-6;

struct SufficiencyReport {
  Family family = Family::Lasso;
  std::size_t dim = 0;
  std::optional<double> lambda;
  double max_deviation = 0.0;     ///< max |T(x) - T(R(x))|
  double objective_gap = 0.0;     ///< |f_x(T(x)) - f_x(T(R(x)))| / (1 + |f_x(T(x))|)
  std::size_t containment_violations = 0;  ///< entries of T(x) outside the mask support
  /// Largest independent_kkt over both solves.
  double kkt_residual = 0.0;
  ConditionReport conditions;
  bool converged = false;
  bool pass = false;
  std::string note;
};

/// Solves on x and on R(x) and compares them. Strictly convex families must
/// agree entrywise within tol. FantopeSPCA, whose solution can be
/// non-unique, is judged by support containment and equal objective value.
/// mask_override replaces the reduction's mask (R(x) = mask o x), which is
/// how negative controls are built.
SufficiencyReport check_sufficiency(const EstimatorSpec& spec, const Input& x,
                                    double tol = kEqualityTol,
                                    const std::optional<MaskProjection>& mask_override = std::nullopt);

/// Pairs (i < j) in different blocks with |theta_ij| > tol.
std::vector<std::pair<std::size_t, std::size_t>> check_support_containment(
    const SymMatrix& theta, const Partition& partition, double tol);

/// All binary symmetric unit-diagonal ultrametric B with B_ij = 1 wherever
/// |X_ij| > lambda. Throws LimitExceeded for p > kEnumerationLimit.
std::vector<SymMatrix> enumerate_feasible_ultrametrics(const SymMatrix& x, double lambda);

/// slc(|X|, lambda) is feasible and the unique minimizer of the entry sum
/// among enumerate_feasible_ultrametrics(X, lambda).
bool check_minimality_slc(const SymMatrix& x, double lambda);

/// A binary unit-diagonal matrix is ultrametric exactly when it is PSD.
/// Returns whether the two tests agree at eigenvalue tolerance tol.
bool ultrametric_psd_agree(const SymMatrix& b, double tol = 1e-10);

/// KKT residual of a report recomputed without the solver's kernels
/// (Jacobi eigensolver, Gauss-Jordan inverse, separate Ising enumeration),
/// scaled like SolveReport::kkt_residual.
double independent_kkt(const EstimatorSpec& spec, const Input& x, const SolveReport& report);

// ---------------------------------------------------------------------------
// Random instances

struct InstanceOptions {
  std::size_t p = 10;
  std::size_t blocks = 2;
  double signal = 1.5;  ///< loading of each variable on its block factor
  std::size_t n = 0;    ///< observations; 0 means 2p + 10
};

/// X = V^T V / n with V_tj = signal * f_t,block(j) + noise.
SymMatrix random_covariance(std::mt19937_64& rng, const InstanceOptions& opts);

/// Moments E[u u^T] of n samples u in {-1,+1}^p whose coordinates copy
/// their block's latent sign with probability 1/2 + signal/4, clamped.
SymMatrix random_sign_moments(std::mt19937_64& rng, const InstanceOptions& opts);

/// Random correlation matrix (PSD, unit diagonal).
SymMatrix random_correlation(std::mt19937_64& rng, std::size_t p);

/// Points strictly between adjacent distinct off-diagonal magnitudes, taken
/// at quantiles (g + 0.5) / points. Never equal to an entry, so no ties.
Vector lambda_grid(const SymMatrix& x, std::size_t points = 10);

/// Midpoint between the largest cross-block magnitude and the next larger
/// off-diagonal magnitude: the smallest gap-centred lambda whose threshold
/// graph cannot join two blocks of the partition.
double separating_lambda(const SymMatrix& x, const Partition& partition);

// ---------------------------------------------------------------------------
// Suites

struct SuiteOptions {
  std::uint64_t seed = 0;
  std::vector<std::size_t> sizes{5, 10, 20};
  std::vector<Family> families{Family::Lasso,           Family::NNLS,
                               Family::GraphicalLasso,  Family::FantopeSPCA,
                               Family::SparseCovariance, Family::PositiveInvCov,
                               Family::IsingPMLE};
  /// Any of sufficiency, minimality, orbitope, corrupted.
  std::vector<std::string> suites{"sufficiency", "minimality", "orbitope"};
  std::size_t instances = 2;   ///< per size and family
  std::size_t lambdas = 3;     ///< per instance
  bool record_timings = true;
};

struct SuiteFailure {
  std::string suite;
  std::string check;
  std::string detail;
  double value = 0.0;
};

struct SuiteSummary {
  std::size_t trials = 0;
  std::vector<SuiteFailure> failures;
  std::map<std::string, double> worst;    ///< largest observed deviation per check
  std::map<std::string, double> timings;  ///< seconds per suite

  bool ok() const { return failures.empty(); }
};

/// Deterministic for a given seed apart from the timings. The corrupted
/// suite is a negative control: it breaks one required entry of each
/// emitted mask and records every trial as a failure, with check
/// "detected" when check_sufficiency rejects the broken mask and
/// "undetected" when it does not.
SuiteSummary run_suite(const SuiteOptions& opts);

std::string to_json(const SuiteSummary& summary);

struct BenchResult {
  std::size_t p = 0;
  std::size_t planted_blocks = 0;
  std::size_t found_blocks = 0;
  double lambda = 0.0;
  double direct_seconds = 0.0;
  double decomposed_seconds = 0.0;
  double speedup = 0.0;
  double deviation = 0.0;
  bool direct_converged = false;
  bool decomposed_converged = false;
};

/// Graphical lasso on a planted block-diagonal covariance, solved directly and
/// through solve_decomposed. lambda <= 0 picks separating_lambda.
BenchResult bench_decomposition(std::size_t p, std::size_t blocks, double lambda, std::uint64_t seed,
                                std::size_t threads = 0);

std::string to_json(const BenchResult& result);

} // namespace suffreduce
