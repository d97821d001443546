#include "suffreduce/linkage.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include <json.hpp>

#include "suffreduce/error.hpp"

namespace suffreduce {

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x) {
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const std::size_t next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

bool UnionFind::unite(std::size_t x, std::size_t y) {
  x = find(x);
  y = find(y);
  if (x == y) return false;
  if (rank_[x] < rank_[y]) std::swap(x, y);
  parent_[y] = x;
  if (rank_[x] == rank_[y]) ++rank_[x];
  return true;
}

// ---------------------------------------------------------------------------
// Partition

Partition Partition::from_labels(const std::vector<std::size_t>& labels) {
  Partition out;
  out.labels_.resize(labels.size());
  std::unordered_map<std::size_t, std::size_t> canon;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = canon.try_emplace(labels[i], out.blocks_.size());
    if (inserted) out.blocks_.emplace_back();
    out.labels_[i] = it->second;
    out.blocks_[it->second].push_back(i);
  }
  return out;
}

Partition Partition::from_blocks(std::vector<std::vector<std::size_t>> blocks, std::size_t p) {
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> labels(p, unset);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw InvalidArgument("partition: empty block");
    for (std::size_t i : blocks[b]) {
      if (i >= p) throw InvalidArgument("partition: index " + std::to_string(i) + " out of range");
      if (labels[i] != unset)
        throw InvalidArgument("partition: index " + std::to_string(i) + " in two blocks");
      labels[i] = b;
    }
  }
  for (std::size_t i = 0; i < p; ++i)
    if (labels[i] == unset)
      throw InvalidArgument("partition: index " + std::to_string(i) + " not covered");
  return from_labels(labels);
}

Partition Partition::singletons(std::size_t p) {
  std::vector<std::size_t> labels(p);
  std::iota(labels.begin(), labels.end(), std::size_t{0});
  return from_labels(labels);
}

Partition Partition::single_block(std::size_t p) {
  return from_labels(std::vector<std::size_t>(p, 0));
}

SymMatrix Partition::cluster_matrix() const {
  const std::size_t p = size();
  SymMatrix out(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) out(i, j) = labels_[i] == labels_[j] ? 1.0 : 0.0;
  return out;
}

bool Partition::refines(const Partition& coarser) const {
  if (coarser.size() != size()) return false;
  for (const auto& block : blocks_)
    for (std::size_t i : block)
      if (coarser.labels_[i] != coarser.labels_[block.front()]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Thresholding and single linkage

Partition components_above(const SymMatrix& w, double tau) {
  const std::size_t p = w.dim();
  UnionFind uf(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (w(i, j) > tau) uf.unite(i, j);
  std::vector<std::size_t> labels(p);
  for (std::size_t i = 0; i < p; ++i) labels[i] = uf.find(i);
  return Partition::from_labels(labels);
}

Partition threshold_components(const SymMatrix& x, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("threshold_components: lambda must be >= 0");
  return components_above(abs(x), lambda);
}

Dendrogram mst_kruskal(const SymMatrix& x) {
  const std::size_t p = x.dim();
  if (p == 0) throw InvalidArgument("mst_kruskal: empty matrix");

  struct Edge {
    double w;
    std::size_t i, j;
  };
  std::vector<Edge> edges;
  edges.reserve(p * (p - 1) / 2);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) edges.push_back({std::abs(x(i, j)), i, j});
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.w != b.w) return a.w > b.w;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  Dendrogram d;
  d.leaves = p;
  UnionFind uf(p);
  std::vector<std::size_t> cluster_of_root(p);
  std::iota(cluster_of_root.begin(), cluster_of_root.end(), std::size_t{0});
  for (const Edge& e : edges) {
    const std::size_t ri = uf.find(e.i);
    const std::size_t rj = uf.find(e.j);
    if (ri == rj) continue;
    const std::size_t id = p + d.merges.size();
    d.merges.push_back({cluster_of_root[ri], cluster_of_root[rj], e.w});
    uf.unite(ri, rj);
    cluster_of_root[uf.find(ri)] = id;
    if (d.merges.size() + 1 == p) break;
  }
  return d;
}

Partition cut_dendrogram(const Dendrogram& d, double lambda) {
  const std::size_t p = d.leaves;
  const std::size_t nodes = p + d.merges.size();
  UnionFind uf(nodes);
  for (std::size_t m = 0; m < d.merges.size(); ++m) {
    const Merge& mg = d.merges[m];
    if (mg.a >= p + m || mg.b >= p + m)
      throw InvalidArgument("cut_dendrogram: merge " + std::to_string(m) +
                            " references a cluster that does not exist yet");
    if (mg.height > lambda) {
      uf.unite(mg.a, p + m);
      uf.unite(mg.b, p + m);
    }
  }
  std::vector<std::size_t> labels(p);
  for (std::size_t i = 0; i < p; ++i) labels[i] = uf.find(i);
  return Partition::from_labels(labels);
}

SymMatrix slc(const SymMatrix& w, double tau) { return components_above(w, tau).cluster_matrix(); }

SymMatrix slt(const SymMatrix& x, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("slt: lambda must be >= 0");
  return hadamard(slc(abs(x), lambda), x);
}

SymMatrix slt_plus(const SymMatrix& x) { return hadamard(slc(x, 0.0), x); }

bool is_binary_ultrametric(const SymMatrix& b) {
  const std::size_t p = b.dim();
  if (!is_binary(b)) throw InvalidArgument("is_binary_ultrametric: entries must be 0 or 1");
  for (std::size_t i = 0; i < p; ++i)
    if (b(i, i) != 1.0) throw InvalidArgument("is_binary_ultrametric: diagonal must be 1");
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      if (b(i, j) == 1.0) continue;
      for (std::size_t k = 0; k < p; ++k)
        if (b(i, k) == 1.0 && b(j, k) == 1.0) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// JSON

std::string dendrogram_to_json(const Dendrogram& d) {
  nlohmann::json j;
  j["leaves"] = d.leaves;
  j["merges"] = nlohmann::json::array();
  for (const Merge& m : d.merges) j["merges"].push_back({{"a", m.a}, {"b", m.b}, {"height", m.height}});
  return j.dump(2);
}

Dendrogram dendrogram_from_json(const std::string& text) {
  Dendrogram d;
  try {
    const auto j = nlohmann::json::parse(text);
    d.leaves = j.at("leaves").get<std::size_t>();
    for (const auto& m : j.at("merges"))
      d.merges.push_back(
          {m.at("a").get<std::size_t>(), m.at("b").get<std::size_t>(), m.at("height").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("dendrogram json: ") + e.what());
  }
  return d;
}

} // namespace suffreduce
