#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lntopo/error.hpp"

namespace lntopo {

// Opaque node identifier: a lowercase hex public key for snapshots, a
// decimal index for synthetic graphs.
class NodeId {
 public:
  NodeId() = default;
  explicit NodeId(std::string value) : value_(std::move(value)) {}
  explicit NodeId(const char* value) : value_(value) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
  friend bool operator==(const NodeId&, const NodeId&) = default;

 private:
  std::string value_;
};

using NodeIndex = std::uint32_t;
inline constexpr std::int32_t kUnreachable = -1;

// One raw payment channel as read from a snapshot, before collapsing.
struct RawEdge {
  NodeId u;
  NodeId v;
  std::uint64_t capacity = 0;
};

// Collapsed undirected edge between two node indices, u < v.
struct IndexedEdge {
  NodeIndex u = 0;
  NodeIndex v = 0;
  std::uint64_t capacity = 0;
  std::uint32_t channel_count = 1;

  friend bool operator==(const IndexedEdge&, const IndexedEdge&) = default;
};

struct Edge {
  NodeId u;
  NodeId v;
  std::uint64_t capacity = 0;
  std::uint32_t channel_count = 1;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable undirected simple graph with summed channel capacities.
///
/// Nodes are stored sorted by NodeId, so a NodeIndex order is the NodeId
/// order and every traversal below is deterministic. Adjacency lists are
/// sorted ascending.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from a node list and raw channels. Self-loops are
  /// dropped; parallel channels collapse into one edge whose capacity is
  /// the sum and whose channel_count is the multiplicity. Duplicate node
  /// ids are merged.
  static Graph build(std::span<const NodeId> nodes, std::span<const RawEdge> raw_edges) {
    std::vector<NodeId> ids(nodes.begin(), nodes.end());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i].empty()) throw StructuralError("node " + std::to_string(i) + " has an empty id");
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    Graph g;
    g.ids_ = std::move(ids);

    std::vector<IndexedEdge> edges;
    edges.reserve(raw_edges.size());
    for (std::size_t i = 0; i < raw_edges.size(); ++i) {
      const auto& raw = raw_edges[i];
      const auto a = g.find(raw.u);
      const auto b = g.find(raw.v);
      if (!a || !b) {
        const auto& missing = a ? raw.v : raw.u;
        throw StructuralError("edge " + std::to_string(i) + " (" + raw.u.str() + ", " +
                              raw.v.str() + ") references unknown node " + missing.str());
      }
      if (*a == *b) continue;
      edges.push_back({std::min(*a, *b), std::max(*a, *b), raw.capacity, 1});
    }
    return from_indexed(std::move(g.ids_), std::move(edges));
  }

  /// Builds directly from sorted unique ids and index edges (u != v).
  /// Parallel entries are collapsed as in build().
  static Graph from_indexed(std::vector<NodeId> sorted_ids, std::vector<IndexedEdge> edges) {
    Graph g;
    g.ids_ = std::move(sorted_ids);
    for (auto& e : edges) {
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end(), [](const IndexedEdge& x, const IndexedEdge& y) {
      return std::pair(x.u, x.v) < std::pair(y.u, y.v);
    });
    for (const auto& e : edges) {
      if (!g.edges_.empty() && g.edges_.back().u == e.u && g.edges_.back().v == e.v) {
        g.edges_.back().capacity += e.capacity;
        g.edges_.back().channel_count += e.channel_count;
      } else {
        g.edges_.push_back(e);
      }
    }

    const std::size_t n = g.ids_.size();
    g.offsets_.assign(n + 1, 0);
    for (const auto& e : g.edges_) {
      ++g.offsets_[e.u + 1];
      ++g.offsets_[e.v + 1];
    }
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
    g.targets_.resize(g.offsets_.back());
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& e : g.edges_) {
      g.targets_[fill[e.u]++] = e.v;
      g.targets_[fill[e.v]++] = e.u;
    }
    for (std::size_t u = 0; u < n; ++u) {
      std::sort(g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u]),
                g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u + 1]));
    }
    return g;
  }

  std::size_t node_count() const noexcept { return ids_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  const std::vector<NodeId>& nodes() const noexcept { return ids_; }
  const NodeId& id(NodeIndex u) const { return ids_[u]; }
  const std::vector<IndexedEdge>& indexed_edges() const noexcept { return edges_; }

  std::span<const NodeIndex> neighbors(NodeIndex u) const {
    return {targets_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  std::size_t degree(NodeIndex u) const { return offsets_[u + 1] - offsets_[u]; }

  std::optional<NodeIndex> find(const NodeId& id) const {
    const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) return std::nullopt;
    return static_cast<NodeIndex>(it - ids_.begin());
  }

  NodeIndex index_of(const NodeId& id) const {
    const auto found = find(id);
    if (!found) throw DomainError("unknown node " + id.str());
    return *found;
  }

  bool contains(const NodeId& id) const { return find(id).has_value(); }

  bool has_edge(NodeIndex u, NodeIndex v) const {
    const auto adj = neighbors(u);
    return std::binary_search(adj.begin(), adj.end(), v);
  }

  Edge edge(std::size_t i) const {
    const auto& e = edges_[i];
    return {ids_[e.u], ids_[e.v], e.capacity, e.channel_count};
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) out.push_back(edge(i));
    return out;
  }

  std::uint64_t total_capacity() const {
    std::uint64_t sum = 0;
    for (const auto& e : edges_) sum += e.capacity;
    return sum;
  }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> out(node_count());
    for (NodeIndex u = 0; u < node_count(); ++u) out[u] = degree(u);
    return out;
  }

  /// Subgraph induced by the nodes whose `keep` flag is set.
  Graph induced(std::span<const std::uint8_t> keep) const {
    std::vector<NodeIndex> remap(node_count(), std::numeric_limits<NodeIndex>::max());
    std::vector<NodeId> ids;
    for (NodeIndex u = 0; u < node_count(); ++u) {
      if (keep[u]) {
        remap[u] = static_cast<NodeIndex>(ids.size());
        ids.push_back(ids_[u]);
      }
    }
    std::vector<IndexedEdge> edges;
    for (const auto& e : edges_) {
      if (keep[e.u] && keep[e.v]) edges.push_back({remap[e.u], remap[e.v], e.capacity, e.channel_count});
    }
    return from_indexed(std::move(ids), std::move(edges));
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.ids_ == b.ids_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<NodeId> ids_;
  std::vector<IndexedEdge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeIndex> targets_;
};

// ---------------------------------------------------------------------------
// Traversal

/// Hop distances from `source`; kUnreachable where no path exists.
/// Nodes with `alive[u] == 0` are treated as absent when `alive` is given.
inline std::vector<std::int32_t> hop_distances(const Graph& g, NodeIndex source,
                                               std::span<const std::uint8_t> alive = {}) {
  std::vector<std::int32_t> dist(g.node_count(), kUnreachable);
  std::vector<NodeIndex> queue;
  queue.reserve(g.node_count());
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeIndex u = queue[head];
    for (const NodeIndex v : g.neighbors(u)) {
      if (dist[v] != kUnreachable || (!alive.empty() && !alive[v])) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }
  return dist;
}

/// Unweighted shortest-path hop counts from `source`. Unreachable nodes are
/// omitted.
inline std::map<NodeId, std::size_t> bfs_distances(const Graph& g, const NodeId& source) {
  const auto dist = hop_distances(g, g.index_of(source));
  std::map<NodeId, std::size_t> out;
  for (NodeIndex u = 0; u < g.node_count(); ++u) {
    if (dist[u] != kUnreachable) out.emplace(g.id(u), static_cast<std::size_t>(dist[u]));
  }
  return out;
}

/// Component label per node (labels in discovery order); dead nodes get
/// the label max(). Returns the number of components among live nodes.
inline std::size_t label_components(const Graph& g, std::vector<std::uint32_t>& label,
                                    std::span<const std::uint8_t> alive = {}) {
  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
  label.assign(g.node_count(), kNone);
  std::vector<NodeIndex> stack;
  std::uint32_t next = 0;
  for (NodeIndex s = 0; s < g.node_count(); ++s) {
    if (label[s] != kNone || (!alive.empty() && !alive[s])) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeIndex u = stack.back();
      stack.pop_back();
      for (const NodeIndex v : g.neighbors(u)) {
        if (label[v] != kNone || (!alive.empty() && !alive[v])) continue;
        label[v] = next;
        stack.push_back(v);
      }
    }
    ++next;
  }
  return next;
}

/// Connected components as sorted node-index lists, largest first; equal
/// sizes are ordered by their smallest NodeId.
inline std::vector<std::vector<NodeIndex>> connected_components(const Graph& g) {
  std::vector<std::uint32_t> label;
  const std::size_t count = label_components(g, label);
  std::vector<std::vector<NodeIndex>> comps(count);
  for (NodeIndex u = 0; u < g.node_count(); ++u) comps[label[u]].push_back(u);
  // Discovery order already follows the smallest member, so a stable sort
  // by size keeps the tie rule.
  std::stable_sort(comps.begin(), comps.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return comps;
}

inline std::size_t component_count(const Graph& g) {
  std::vector<std::uint32_t> label;
  return label_components(g, label);
}

/// Induced subgraph on the largest component.
inline Graph giant_component(const Graph& g) {
  if (g.empty()) throw DomainError("giant component of an empty graph");
  const auto comps = connected_components(g);
  if (comps.size() == 1) return g;
  std::vector<std::uint8_t> keep(g.node_count(), 0);
  for (const NodeIndex u : comps.front()) keep[u] = 1;
  return g.induced(keep);
}

/// Indices (into g.indexed_edges()) of all bridges, ascending.
/// Iterative low-link DFS.
inline std::vector<std::size_t> bridge_indices(const Graph& g) {
  const std::size_t n = g.node_count();
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> disc(n, kUnset), low(n, 0);
  std::vector<std::pair<NodeIndex, NodeIndex>> found;

  struct Frame {
    NodeIndex node;
    NodeIndex parent;
    std::size_t next;
    bool parent_skipped;
  };
  std::vector<Frame> stack;
  std::uint32_t timer = 0;

  for (NodeIndex root = 0; root < n; ++root) {
    if (disc[root] != kUnset) continue;
    disc[root] = low[root] = timer++;
    stack.push_back({root, root, 0, false});
    while (!stack.empty()) {
      auto& f = stack.back();
      const auto adj = g.neighbors(f.node);
      if (f.next < adj.size()) {
        const NodeIndex v = adj[f.next++];
        if (v == f.parent && f.node != f.parent && !f.parent_skipped) {
          // Simple graph: exactly one edge back to the parent.
          f.parent_skipped = true;
          continue;
        }
        if (disc[v] == kUnset) {
          disc[v] = low[v] = timer++;
          stack.push_back({v, f.node, 0, false});
        } else {
          low[f.node] = std::min(low[f.node], disc[v]);
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          auto& p = stack.back();
          low[p.node] = std::min(low[p.node], low[done.node]);
          if (low[done.node] > disc[p.node]) {
            found.emplace_back(std::min(p.node, done.node), std::max(p.node, done.node));
          }
        }
      }
    }
  }

  std::sort(found.begin(), found.end());
  std::vector<std::size_t> out;
  out.reserve(found.size());
  const auto& edges = g.indexed_edges();
  for (const auto& [u, v] : found) {
    const auto it = std::lower_bound(edges.begin(), edges.end(), std::pair(u, v),
                                     [](const IndexedEdge& e, const std::pair<NodeIndex, NodeIndex>& key) {
                                       return std::pair(e.u, e.v) < key;
                                     });
    out.push_back(static_cast<std::size_t>(it - edges.begin()));
  }
  return out;
}

/// Edges whose deletion increases the number of connected components.
inline std::vector<Edge> bridges(const Graph& g) {
  std::vector<Edge> out;
  for (const auto i : bridge_indices(g)) out.push_back(g.edge(i));
  return out;
}

struct DistanceSummary {
  std::int32_t diameter = 0;
  std::int32_t radius = 0;
  double mean_shortest_path = 0.0;
};

/// Eccentricity statistics and mean hop distance over ordered pairs, all
/// computed on the giant component.
inline DistanceSummary distance_summary(const Graph& g) {
  if (g.empty()) throw DomainError("distance summary of an empty graph");
  const auto comps = connected_components(g);
  const auto& giant = comps.front();
  if (giant.size() < 2) throw DomainError("giant component has fewer than 2 nodes");

  DistanceSummary out;
  out.radius = std::numeric_limits<std::int32_t>::max();
  std::uint64_t total = 0;
  for (const NodeIndex s : giant) {
    const auto dist = hop_distances(g, s);
    std::int32_t ecc = 0;
    for (const NodeIndex t : giant) {
      ecc = std::max(ecc, dist[t]);
      total += static_cast<std::uint64_t>(dist[t]);
    }
    out.diameter = std::max(out.diameter, ecc);
    out.radius = std::min(out.radius, ecc);
  }
  const double pairs = static_cast<double>(giant.size()) * static_cast<double>(giant.size() - 1);
  out.mean_shortest_path = static_cast<double>(total) / pairs;
  return out;
}

/// A new graph without `victims` and their incident edges.
inline Graph remove_nodes(const Graph& g, std::span<const NodeId> victims) {
  std::vector<std::uint8_t> keep(g.node_count(), 1);
  for (const auto& v : victims) keep[g.index_of(v)] = 0;
  return g.induced(keep);
}

}  // namespace lntopo
