#include <cstdlib>

#include "suffreduce/error.hpp"
#include "suffreduce/estimators.hpp"
#include "suffreduce/verify.hpp"
#include "test_support.hpp"

using namespace suffreduce;

namespace {

SymMatrix two_block(std::mt19937_64& rng, std::size_t p) {
  InstanceOptions io;
  io.p = p;
  io.blocks = 2;
  SymMatrix x = random_covariance(rng, io);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if ((i < p / 2) != (j < p / 2)) x(i, j) = 0.0;
  return x;
}

std::size_t nonzero_offblock(const SymMatrix& t, const Partition& part) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.dim(); ++i)
    for (std::size_t j = i + 1; j < t.dim(); ++j)
      if (!part.same_block(i, j) && t(i, j) != 0.0) ++n;
  return n;
}

} // namespace

TEST(SolveDecomposed, GlassoTwoBlocksMatchesDirect) {
  std::mt19937_64 rng(71);
  const SymMatrix x = two_block(rng, 12);
  const auto spec = EstimatorSpec::graphical_lasso(0.05);
  const SolveReport direct = solve(spec, x), split = solve_decomposed(spec, x, 2);
  ASSERT_TRUE(split.converged);
  EXPECT_GE(split.blocks.size(), 2u);
  EXPECT_TRUE(test::near(direct.matrix(), split.matrix(), 1e-6));
  EXPECT_EQ(nonzero_offblock(split.matrix(), threshold_components(x, 0.05)), 0u);
  EXPECT_NEAR(split.objective, objective(spec, x, split.theta), 1e-12);
  EXPECT_LE(independent_kkt(spec, x, split), 1e-8);
}

TEST(SolveDecomposed, SingleBlockIsSolve) {
  std::mt19937_64 rng(72);
  InstanceOptions io;
  io.p = 8;
  io.blocks = 1;
  const SymMatrix x = random_covariance(rng, io);
  const auto spec = EstimatorSpec::graphical_lasso(0.01);
  ASSERT_EQ(threshold_components(x, 0.01).block_count(), 1u);
  const SolveReport direct = solve(spec, x), split = solve_decomposed(spec, x, 1);
  EXPECT_EQ(split.blocks.size(), 1u);
  EXPECT_EQ(direct.matrix(), split.matrix());
}

TEST(SolveDecomposed, EveryFamilyAgreesWithDirect) {
  std::mt19937_64 rng(73);
  const SymMatrix x = two_block(rng, 10);
  for (const EstimatorSpec& spec :
       {EstimatorSpec::graphical_lasso(0.3), EstimatorSpec::sparse_covariance(0.3, 0.01),
        EstimatorSpec::positive_invcov(), EstimatorSpec::fantope_spca(0.3, 2)}) {
    const SolveReport direct = solve(spec, x), split = solve_decomposed(spec, x, 3);
    EXPECT_TRUE(split.converged) << to_string(spec.family);
    EXPECT_TRUE(test::near(direct.matrix(), split.matrix(), 1e-5)) << to_string(spec.family);
  }
}

TEST(SolveDecomposed, FantopeFallsBackToWholeSolve) {
  std::mt19937_64 rng(74);
  const SymMatrix x = two_block(rng, 10);
  const auto spec = EstimatorSpec::fantope_spca(0.3, 2);
  const SolveReport split = solve_decomposed(spec, x, 2);
  ASSERT_EQ(split.blocks.size(), 1u);
  EXPECT_EQ(split.blocks[0].indices.size(), 10u);
  EXPECT_EQ(split.matrix(), solve(spec, slt(x, 0.3)).matrix());
}

TEST(SolveDecomposed, IsingAllowsLargeDisconnectedInputs) {
  std::mt19937_64 rng(75);
  InstanceOptions io;
  io.p = 20;
  io.blocks = 4;
  const SymMatrix x = random_sign_moments(rng, io);
  const auto spec = EstimatorSpec::ising(0.5);
  const Partition part = threshold_components(x, 0.5);
  std::size_t biggest = 0;
  for (const auto& b : part.blocks()) biggest = std::max(biggest, b.size());
  ASSERT_LE(biggest, kIsingLimit);
  const SolveReport split = solve_decomposed(spec, x, 2);
  EXPECT_TRUE(split.converged);
  EXPECT_EQ(nonzero_offblock(split.matrix(), part), 0u);
  EXPECT_THROW(solve(spec, x), LimitExceeded);
  EXPECT_THROW(solve_decomposed(EstimatorSpec::ising(0.0), x, 1), LimitExceeded);
}

TEST(SolveDecomposed, ThreadCountDoesNotChangeResult) {
  std::mt19937_64 rng(76);
  InstanceOptions io;
  io.p = 30;
  io.blocks = 6;
  SymMatrix x = random_covariance(rng, io);
  const double lam = 2.0;
  const auto spec = EstimatorSpec::graphical_lasso(lam);
  const SolveReport a = solve_decomposed(spec, x, 1), b = solve_decomposed(spec, x, 4);
  EXPECT_EQ(a.matrix(), b.matrix());
  EXPECT_EQ(a.blocks.size(), b.blocks.size());
}

TEST(SolveDecomposed, ThreadsFromEnvironment) {
  std::mt19937_64 rng(77);
  const SymMatrix x = two_block(rng, 8);
  const auto spec = EstimatorSpec::graphical_lasso(0.3);
  setenv("SUFFREDUCE_THREADS", "2", 1);
  EXPECT_NO_THROW(solve_decomposed(spec, x));
  setenv("SUFFREDUCE_THREADS", "two", 1);
  EXPECT_THROW(solve_decomposed(spec, x), InvalidArgument);
  unsetenv("SUFFREDUCE_THREADS");
}

TEST(SolveDecomposed, RejectsVectorFamilies) {
  EXPECT_THROW(solve_decomposed(EstimatorSpec::lasso(1.0), SymMatrix::identity(2)), InvalidArgument);
}
