#include "suffreduce/error.hpp"
#include "suffreduce/linkage.hpp"
#include "test_support.hpp"

using namespace suffreduce;
using suffreduce::test::make;

namespace {

const SymMatrix kX = make({{1, .8, .1}, {.8, 1, .5}, {.1, .5, 1}});

// Bottleneck (max-min) path strength by Floyd-Warshall; i ~ j iff it exceeds tau.
SymMatrix maximin_oracle(const SymMatrix& w, double tau) {
  const std::size_t p = w.dim();
  std::vector<std::vector<double>> s(p, std::vector<double>(p, -INFINITY));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      if (i != j) s[i][j] = w(i, j);
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) s[i][j] = std::max(s[i][j], std::min(s[i][k], s[k][j]));
  SymMatrix b = SymMatrix::identity(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) b(i, j) = s[i][j] > tau ? 1.0 : 0.0;
  return b;
}

} // namespace

TEST(UnionFind, UniteAndFind) {
  UnionFind uf(5);
  EXPECT_TRUE(uf.unite(0, 3));
  EXPECT_TRUE(uf.unite(3, 4));
  EXPECT_FALSE(uf.unite(0, 4));
  EXPECT_EQ(uf.find(0), uf.find(4));
  EXPECT_NE(uf.find(1), uf.find(0));
  EXPECT_EQ(uf.size(), 5u);
}

TEST(Partition, CanonicalForm) {
  const Partition a = Partition::from_labels({7, 3, 7, 9});
  EXPECT_EQ(a.labels(), (std::vector<std::size_t>{0, 1, 0, 2}));
  EXPECT_EQ(a, Partition::from_blocks({{3}, {1}, {2, 0}}, 4));
  EXPECT_EQ(a.block_count(), 3u);
  EXPECT_TRUE(Partition::singletons(4).refines(a));
  EXPECT_TRUE(a.refines(Partition::single_block(4)));
  EXPECT_FALSE(a.refines(Partition::singletons(4)));
  EXPECT_THROW(Partition::from_blocks({{0, 1}, {1, 2}}, 3), InvalidArgument);
  EXPECT_THROW(Partition::from_blocks({{0}}, 2), InvalidArgument);
}

TEST(ThresholdComponents, Examples) {
  EXPECT_EQ(threshold_components(kX, 0.9), Partition::singletons(3));
  EXPECT_EQ(threshold_components(kX, 0.4), Partition::single_block(3));
  EXPECT_EQ(threshold_components(kX, 0.6), Partition::from_blocks({{0, 1}, {2}}, 3));
}

TEST(ThresholdComponents, StrictInequality) {
  EXPECT_EQ(threshold_components(kX, 0.8), Partition::singletons(3));
  EXPECT_THROW(threshold_components(kX, -0.1), InvalidArgument);
}

TEST(MstKruskal, Examples) {
  const Dendrogram d = mst_kruskal(kX);
  EXPECT_EQ(d.leaves, 3u);
  EXPECT_EQ(d.merges, (std::vector<Merge>{{0, 1, 0.8}, {3, 2, 0.5}}));

  const Dendrogram id = mst_kruskal(SymMatrix::identity(3));
  ASSERT_EQ(id.merges.size(), 2u);
  for (const Merge& m : id.merges) EXPECT_EQ(m.height, 0.0);

  EXPECT_TRUE(mst_kruskal(SymMatrix::identity(1)).merges.empty());
}

TEST(MstKruskal, UsesMagnitudes) {
  const Dendrogram d = mst_kruskal(make({{1, -.9, 0}, {-.9, 1, .2}, {0, .2, 1}}));
  EXPECT_EQ(d.merges.front().height, 0.9);
}

TEST(CutDendrogram, Examples) {
  const Dendrogram d = mst_kruskal(kX);
  EXPECT_EQ(cut_dendrogram(d, 0.6), Partition::from_blocks({{0, 1}, {2}}, 3));
  EXPECT_EQ(cut_dendrogram(d, -1.0), Partition::single_block(3));
  EXPECT_EQ(cut_dendrogram(d, 0.8), Partition::singletons(3));
}

TEST(Slc, Examples) {
  EXPECT_EQ(slc(abs(kX), 0.4), SymMatrix::ones(3));
  EXPECT_EQ(slc(abs(kX), 0.6), make({{1, 1, 0}, {1, 1, 0}, {0, 0, 1}}));
  EXPECT_EQ(slc(abs(kX), 0.95), SymMatrix::identity(3));
}

TEST(Slt, Examples) {
  EXPECT_EQ(slt(kX, 0.6), make({{1, .8, 0}, {.8, 1, 0}, {0, 0, 1}}));
  EXPECT_EQ(slt(kX, 0.0), kX);
  EXPECT_EQ(slt(slt(kX, 0.6), 0.6), slt(kX, 0.6));
  EXPECT_THROW(slt(kX, -1.0), InvalidArgument);
}

TEST(SltPlus, Examples) {
  EXPECT_EQ(slt_plus(make({{1, -.5}, {-.5, 1}})), SymMatrix::identity(2));
  EXPECT_EQ(slt_plus(make({{1, .5}, {.5, 1}})), make({{1, .5}, {.5, 1}}));
  const SymMatrix y = make({{1, .5, -.2}, {.5, 1, .3}, {-.2, .3, 1}});
  EXPECT_EQ(slt_plus(y), y);
}

TEST(BinaryUltrametric, Examples) {
  EXPECT_FALSE(is_binary_ultrametric(make({{1, 1, 0}, {1, 1, 1}, {0, 1, 1}})));
  EXPECT_TRUE(is_binary_ultrametric(SymMatrix::identity(4)));
  EXPECT_TRUE(is_binary_ultrametric(SymMatrix::ones(4)));
  EXPECT_THROW(is_binary_ultrametric(make({{1, .5}, {.5, 1}})), InvalidArgument);
  EXPECT_THROW(is_binary_ultrametric(make({{0, 1}, {1, 1}})), InvalidArgument);
}

TEST(DendrogramJson, RoundTrip) {
  const Dendrogram d = mst_kruskal(kX);
  const std::string text = dendrogram_to_json(d);
  EXPECT_NE(text.find("\"leaves\""), std::string::npos);
  EXPECT_NE(text.find("\"merges\""), std::string::npos);
  EXPECT_EQ(dendrogram_from_json(text), d);
  EXPECT_THROW(dendrogram_from_json("{\"leaves\": 2}"), InvalidArgument);
}

TEST(LinkageProperties, FourRoutesAgree) {
  std::mt19937_64 rng(21);
  for (std::size_t p : {1, 2, 5, 12, 30}) {
    for (int rep = 0; rep < 3; ++rep) {
      const SymMatrix x = test::random_symmetric(rng, p);
      const Dendrogram d = mst_kruskal(x);
      ASSERT_EQ(d.merges.size(), p - 1);
      for (std::size_t m = 1; m < d.merges.size(); ++m) EXPECT_LE(d.merges[m].height, d.merges[m - 1].height);
      for (double lam : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
        const SymMatrix b = slc(abs(x), lam);
        EXPECT_EQ(b, maximin_oracle(abs(x), lam)) << "p=" << p << " lambda=" << lam;
        EXPECT_EQ(b, cut_dendrogram(d, lam).cluster_matrix());
        EXPECT_EQ(b, threshold_components(x, lam).cluster_matrix());
      }
    }
  }
}

TEST(LinkageProperties, SlcIsUltrametricAndPsd) {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 20; ++rep) {
    const SymMatrix x = test::random_symmetric(rng, 3 + rep % 10);
    for (double lam : {0.2, 0.5, 0.8}) {
      const SymMatrix b = slc(abs(x), lam);
      EXPECT_TRUE(is_binary(b));
      for (std::size_t i = 0; i < b.dim(); ++i) EXPECT_EQ(b(i, i), 1.0);
      EXPECT_TRUE(is_binary_ultrametric(b));
      EXPECT_GE(min_eigenvalue(b), -1e-10);
    }
  }
}

TEST(LinkageProperties, MonotoneRefinement) {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const SymMatrix x = test::random_symmetric(rng, 15);
    double prev = 0.0;
    for (double lam : {0.05, 0.2, 0.4, 0.6, 0.8, 0.95}) {
      EXPECT_TRUE(threshold_components(x, lam).refines(threshold_components(x, prev)));
      prev = lam;
    }
  }
}

TEST(LinkageProperties, SltIdempotent) {
  std::mt19937_64 rng(24);
  for (int rep = 0; rep < 20; ++rep) {
    const SymMatrix x = test::random_symmetric(rng, 10);
    for (double lam : {0.3, 0.6, 0.9}) EXPECT_EQ(slt(slt(x, lam), lam), slt(x, lam));
    EXPECT_EQ(slt_plus(slt_plus(x)), slt_plus(x));
  }
}
