#include <sstream>

#include "json.hpp"
#include "suffreduce/error.hpp"
#include "suffreduce/io.hpp"
#include "test_support.hpp"

using namespace suffreduce;

TEST(ReadCsv, PlainAndHeader) {
  std::istringstream a("1,2\n3,4\n");
  EXPECT_EQ(read_csv(a), Matrix::from_rows({{1, 2}, {3, 4}}));
  std::istringstream b("x,y\n1.5,-2e-3\n\n+7,0\n");
  EXPECT_EQ(read_csv(b, true), Matrix::from_rows({{1.5, -2e-3}, {7, 0}}));
}

TEST(ReadCsv, Errors) {
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(read_csv(ragged), InvalidArgument);
  std::istringstream text("1,abc\n");
  EXPECT_THROW(read_csv(text), InvalidArgument);
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty), InvalidArgument);
  std::istringstream only_header("a,b\n");
  EXPECT_THROW(read_csv(only_header, true), InvalidArgument);
  EXPECT_THROW(read_csv_file("/nonexistent/file.csv"), InvalidArgument);
}

TEST(ReadVotes, Codes) {
  std::istringstream ok("1,-1,0\n0,1,1\n");
  EXPECT_EQ(read_votes_csv(ok), Matrix::from_rows({{1, -1, 0}, {0, 1, 1}}));
  std::istringstream bad("1,0.5\n");
  EXPECT_THROW(read_votes_csv(bad), InvalidArgument);
}

TEST(VotesToCovariance, Examples) {
  std::istringstream two("1,1\n1,-1\n");
  EXPECT_EQ(uncentered_covariance(read_votes_csv(two)), SymMatrix::identity(2));
  std::istringstream one("1,-1,1\n");
  const SymMatrix c = uncentered_covariance(read_votes_csv(one));
  EXPECT_EQ(c(0, 1), -1.0);
  EXPECT_EQ(c(0, 2), 1.0);
}

TEST(WriteCsv, RoundTripIsBitExact) {
  std::mt19937_64 rng(81);
  const SymMatrix x = test::random_symmetric(rng, 9, 1e3);
  std::ostringstream out;
  write_csv(out, x);
  std::istringstream in(out.str());
  EXPECT_EQ(from_dense(read_csv(in), 0.0), x);

  const Vector v{0.1, -1e-300, 12345.678901234567, 5e-324};
  std::ostringstream vo;
  write_csv(vo, v);
  std::istringstream vi(vo.str());
  const Matrix back = read_csv(vi);
  ASSERT_EQ(back.cols(), 1u);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(back(i, 0), v[i]);
}

TEST(FormatDouble, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
}

TEST(ReportJson, Fields) {
  const auto spec = EstimatorSpec::graphical_lasso(0.3);
  const SolveReport r = solve(spec, SymMatrix::identity(2));
  const auto j = nlohmann::json::parse(to_json(r, spec));
  EXPECT_EQ(j["estimator"], "glasso");
  EXPECT_EQ(j["converged"], true);
  for (const char* key : {"objective", "kkt_residual", "iterations", "support", "blocks", "wall_seconds"})
    EXPECT_TRUE(j.contains(key)) << key;
}

TEST(PartitionJson, Fields) {
  const auto j = nlohmann::json::parse(partition_to_json(Partition::from_labels({0, 1, 0})));
  EXPECT_EQ(j["labels"], nlohmann::json({0, 1, 0}));
  EXPECT_EQ(j["blocks"], nlohmann::json({{0, 2}, {1}}));
}
