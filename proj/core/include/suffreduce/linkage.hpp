#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "suffreduce/symmat.hpp"

namespace suffreduce {

/// Disjoint-set forest with path compression and union by rank.
class UnionFind {
public:
  explicit UnionFind(std::size_t n);

  std::size_t find(std::size_t x);
  /// Returns false if x and y were already in the same set.
  bool unite(std::size_t x, std::size_t y);
  std::size_t size() const noexcept { return parent_.size(); }

private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

/// Index partition of {0, ..., p-1}. Always held in canonical form: blocks
/// are sorted internally and ordered by their smallest member, and labels[i]
/// is the position of i's block. Two partitions compare equal iff they group
/// the indices the same way.
class Partition {
public:
  Partition() = default;

  /// Canonicalizes arbitrary integer labels (any values, one per index).
  static Partition from_labels(const std::vector<std::size_t>& labels);
  /// Throws InvalidArgument unless the blocks are disjoint and cover 0..p-1.
  static Partition from_blocks(std::vector<std::vector<std::size_t>> blocks, std::size_t p);
  static Partition singletons(std::size_t p);
  static Partition single_block(std::size_t p);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t block_count() const noexcept { return blocks_.size(); }
  const std::vector<std::size_t>& labels() const noexcept { return labels_; }
  const std::vector<std::vector<std::size_t>>& blocks() const noexcept { return blocks_; }
  std::size_t label(std::size_t i) const { return labels_.at(i); }
  bool same_block(std::size_t i, std::size_t j) const { return labels_.at(i) == labels_.at(j); }

  /// Binary cluster matrix: 1 iff i and j share a block.
  SymMatrix cluster_matrix() const;

  /// True if every block of this partition lies inside a block of `coarser`.
  bool refines(const Partition& coarser) const;

  bool operator==(const Partition&) const = default;

private:
  std::vector<std::size_t> labels_;
  std::vector<std::vector<std::size_t>> blocks_;
};

struct Merge {
  std::size_t a;  ///< cluster id of the first merged cluster
  std::size_t b;  ///< cluster id of the second merged cluster
  double height;  ///< similarity level at which the two clusters join

  bool operator==(const Merge&) const = default;
};

/// Single-linkage dendrogram. Leaf i has id i; the m-th merge (0-based)
/// creates cluster id leaves + m. Heights are non-increasing.
struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;

  bool operator==(const Dendrogram&) const = default;
};

/// Connected components of the graph with edges {i != j : |x(i,j)| > lambda}.
Partition threshold_components(const SymMatrix& x, double lambda);

/// Components of {i != j : w(i,j) > tau} using the signed weights as given.
Partition components_above(const SymMatrix& w, double tau);

/// Maximum spanning tree of the similarity |x(i,j)| by Kruskal's algorithm,
/// recorded as a dendrogram. Every pair is an edge (zero weights included),
/// so p >= 1 always yields p - 1 merges. Equal weights are taken in
/// lexicographic (i, j) order.
Dendrogram mst_kruskal(const SymMatrix& x);

/// Clusters after applying every merge with height > lambda.
Partition cut_dendrogram(const Dendrogram& d, double lambda);

/// Single-linkage cluster matrix: entry 1 iff i == j or some path joins i
/// and j with every edge weight w(u,v) > tau. No absolute value is taken.
SymMatrix slc(const SymMatrix& w, double tau);

/// Single-linkage thresholding: slc(|x|, lambda) o x. Requires lambda >= 0.
SymMatrix slt(const SymMatrix& x, double lambda);

/// Positivity variant: slc(x, 0) o x, linking only through positive entries.
SymMatrix slt_plus(const SymMatrix& x);

/// Ultrametric inequality b(i,j) >= min(b(i,k), b(j,k)) for all triples.
/// Throws InvalidArgument if b is not binary with unit diagonal.
bool is_binary_ultrametric(const SymMatrix& b);

std::string dendrogram_to_json(const Dendrogram& d);
Dendrogram dendrogram_from_json(const std::string& text);

} // namespace suffreduce
