#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <string_view>
#include <thread>

#include "admm.hpp"
#include "suffreduce/error.hpp"
#include "suffreduce/estimators.hpp"
#include "suffreduce/reduce.hpp"

namespace suffreduce {

namespace {

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SUFFREDUCE_THREADS"); env && *env) {
    const std::string_view s(env);
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc{} || ptr != s.data() + s.size() || n == 0)
      throw InvalidArgument("SUFFREDUCE_THREADS must be a positive integer");
    return n;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

// Largest violation of the zero-solution optimality condition on pairs the
// partition separates; zero whenever the partition comes from the reduction.
double cross_block_slack(const EstimatorSpec& spec, const SymMatrix& x, const Partition& part) {
  const std::size_t p = x.dim();
  const bool positivity = spec.penalty.kind == PenaltyKind::OffDiagPositivity;
  const SymMatrix lam = positivity ? SymMatrix(p) : spec.penalty.weight_matrix(p);
  double worst = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      if (part.same_block(i, j)) continue;
      const double v = positivity ? std::max(0.0, x(i, j)) : std::max(0.0, std::abs(x(i, j)) - lam(i, j));
      worst = std::max(worst, v);
    }
  return worst;
}

} // namespace

SolveReport solve_decomposed(const EstimatorSpec& spec, const SymMatrix& x, std::size_t threads) {
  spec.validate();
  if (!spec.symmetric()) throw InvalidArgument("solve_decomposed: needs a symmetric-matrix estimator");
  const auto t0 = std::chrono::steady_clock::now();
  const ReducedProblem reduced = reduce_input(spec.penalty, Group::DiagonalConjugation, x);
  const SymMatrix& rx = std::get<SymMatrix>(reduced.reduced);

  if (spec.family == Family::FantopeSPCA) {
    SolveReport rep = solve(spec, rx);
    rep.objective = objective(spec, x, rep.theta);
    std::vector<std::size_t> all(x.dim());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    rep.blocks.push_back({std::move(all), rep.wall_seconds, rep.iterations, rep.converged, rep.kkt_residual});
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }

  std::vector<MatrixBlock> blocks = decompose_blocks(rx, reduced.partition);
  if (spec.family == Family::IsingPMLE)
    for (const auto& b : blocks)
      if (b.indices.size() > kIsingLimit)
        throw LimitExceeded("solve_decomposed: an Ising block exceeds the enumeration limit");

  std::vector<SolveReport> results(blocks.size());
  std::vector<std::exception_ptr> errors(blocks.size());
  // Largest blocks first so one long solve does not start last.
  std::vector<std::size_t> order(blocks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&blocks](std::size_t a, std::size_t b) {
    return blocks[a].indices.size() > blocks[b].indices.size();
  });
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t n; (n = next.fetch_add(1)) < order.size();) {
      const std::size_t b = order[n];
      try {
        results[b] = solve(spec, blocks[b].values);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  };
  const std::size_t nthreads = std::min(resolve_threads(threads), std::max<std::size_t>(1, blocks.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  SolveReport rep;
  rep.converged = true;
  const double scale = detail::problem_scale(x);
  double kkt_raw = cross_block_slack(spec, x, reduced.partition);
  // Off-block dual entries: Y = X - M for the quadratic and Ising losses,
  // Y = W - X for the log-det losses, with theta and W zero there.
  const bool logdet = spec.family == Family::GraphicalLasso || spec.family == Family::PositiveInvCov;
  SymMatrix dual = logdet ? -1.0 * x : x;
  bool have_dual = true;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto* yb = results[b].dual ? std::get_if<SymMatrix>(&*results[b].dual) : nullptr;
    if (!yb) {
      have_dual = false;
      continue;
    }
    const auto& idx = blocks[b].indices;
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t c = a; c < idx.size(); ++c) dual(idx[a], idx[c]) = (*yb)(a, c);
  }
  if (spec.family == Family::IsingPMLE)
    for (std::size_t i = 0; i < x.dim(); ++i) dual(i, i) = 0.0;
  if (have_dual) rep.dual = std::move(dual);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    SolveReport& r = results[b];
    rep.iterations += r.iterations;
    rep.converged = rep.converged && r.converged;
    kkt_raw = std::max(kkt_raw, r.kkt_residual * detail::problem_scale(blocks[b].values));
    rep.blocks.push_back({blocks[b].indices, r.wall_seconds, r.iterations, r.converged, r.kkt_residual});
    blocks[b].values = std::move(std::get<SymMatrix>(r.theta));
  }
  SymMatrix theta = reassemble_blocks(blocks, x.dim());
  rep.kkt_residual = kkt_raw / scale;
  if (rep.converged && rep.kkt_residual > spec.options.tol) rep.converged = false;
  rep.objective = objective(spec, x, theta);
  rep.support = detail::support_of(theta);
  rep.theta = std::move(theta);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

} // namespace suffreduce
