#pragma once

// Summary statistics and centralities over a Graph.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "lntopo/error.hpp"
#include "lntopo/graph.hpp"
#include "lntopo/parallel.hpp"
#include "lntopo/random.hpp"

namespace lntopo::metrics {

enum class CentralityKind { Betweenness, Closeness, LocalClustering, Degree };

/// Per-node scores aligned with the graph's node order.
struct CentralityScores {
  CentralityKind kind = CentralityKind::Degree;
  std::vector<NodeId> nodes;
  std::vector<double> values;

  double at(const NodeId& id) const {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
    if (it == nodes.end() || *it != id) throw DomainError("unknown node " + id.str());
    return values[static_cast<std::size_t>(it - nodes.begin())];
  }
};

inline double density(const Graph& g) {
  const auto n = static_cast<double>(g.node_count());
  if (g.node_count() < 2) throw DomainError("density needs at least 2 nodes");
  return 2.0 * static_cast<double>(g.edge_count()) / (n * (n - 1.0));
}

/// Triangles through each node.
inline std::vector<std::uint64_t> triangle_counts(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::uint64_t> t(n, 0);
  std::vector<std::uint8_t> mark(n, 0);
  for (NodeIndex u = 0; u < n; ++u) {
    const auto nu = g.neighbors(u);
    for (const NodeIndex v : nu) mark[v] = 1;
    for (const NodeIndex v : nu) {
      if (v <= u) continue;
      for (const NodeIndex w : g.neighbors(v)) {
        if (w <= v || !mark[w]) continue;
        ++t[u];
        ++t[v];
        ++t[w];
      }
    }
    for (const NodeIndex v : nu) mark[v] = 0;
  }
  return t;
}

/// 3 * triangles / connected triples.
inline double transitivity(const Graph& g) {
  const auto t = triangle_counts(g);
  std::uint64_t closed = 0, triples = 0;
  for (NodeIndex u = 0; u < g.node_count(); ++u) {
    const std::uint64_t d = g.degree(u);
    closed += t[u];
    if (d >= 2) triples += d * (d - 1) / 2;
  }
  if (triples == 0) throw DomainError("transitivity undefined without connected triples");
  return static_cast<double>(closed) / static_cast<double>(triples);
}

namespace detail {

inline double clustering_from(std::uint64_t triangles, std::size_t degree) {
  if (degree < 2) return 0.0;
  const auto d = static_cast<double>(degree);
  return 2.0 * static_cast<double>(triangles) / (d * (d - 1.0));
}

}  // namespace detail

/// Fraction of neighbour pairs that are adjacent; 0 when deg(u) < 2.
inline double local_clustering(const Graph& g, const NodeId& id) {
  const NodeIndex u = g.index_of(id);
  const auto nu = g.neighbors(u);
  std::uint64_t links = 0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    for (std::size_t j = i + 1; j < nu.size(); ++j) {
      if (g.has_edge(nu[i], nu[j])) ++links;
    }
  }
  return detail::clustering_from(links, nu.size());
}

inline CentralityScores local_clustering_all(const Graph& g) {
  const auto t = triangle_counts(g);
  CentralityScores out{CentralityKind::LocalClustering, g.nodes(), std::vector<double>(g.node_count())};
  for (NodeIndex u = 0; u < g.node_count(); ++u) out.values[u] = detail::clustering_from(t[u], g.degree(u));
  return out;
}

inline double average_clustering(const Graph& g) {
  if (g.empty()) throw DomainError("average clustering of an empty graph");
  const auto scores = local_clustering_all(g);
  double sum = 0.0;
  for (const double c : scores.values) sum += c;
  return sum / static_cast<double>(g.node_count());
}

/// Pearson correlation of endpoint degrees over edges, both orientations.
/// Evaluated as an exact integer ratio before the final division.
inline double degree_assortativity(const Graph& g) {
  using Wide = __int128;
  Wide m = 0, s1 = 0, s2 = 0, prod = 0;
  for (const auto& e : g.indexed_edges()) {
    const Wide x = static_cast<Wide>(g.degree(e.u));
    const Wide y = static_cast<Wide>(g.degree(e.v));
    ++m;
    s1 += x + y;
    s2 += x * x + y * y;
    prod += x * y;
  }
  const Wide num = 4 * m * prod - s1 * s1;
  const Wide den = 2 * m * s2 - s1 * s1;
  if (m == 0 || den == 0) throw DomainError("assortativity undefined: endpoint degrees have zero variance");
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

struct SMetric {
  double raw = 0.0;
  double normalized = 0.0;
};

/// s(G) = Σ_{(u,v)∈E} deg(u) deg(v), normalised by the s-value of a greedy
/// high-degree-first realisation of the same degree sequence.
///
/// The greedy pass repeatedly joins the pair of nodes with the largest
/// degree product that still both have free stubs and are not yet joined.
/// It is a heuristic for s_max, so `normalized` can exceed 1 on graphs
/// where the heuristic is beaten by the input itself.
inline SMetric s_metric(const Graph& g) {
  if (g.edge_count() == 0) throw DomainError("s-metric needs at least one edge");
  SMetric out;
  for (const auto& e : g.indexed_edges()) {
    out.raw += static_cast<double>(g.degree(e.u)) * static_cast<double>(g.degree(e.v));
  }

  std::vector<std::uint64_t> deg;
  for (NodeIndex u = 0; u < g.node_count(); ++u) {
    if (g.degree(u) > 0) deg.push_back(g.degree(u));
  }
  std::sort(deg.begin(), deg.end(), std::greater<>());
  const std::size_t n = deg.size();
  std::vector<std::uint64_t> free_stubs = deg;

  // next_free[j]: smallest index ≥ j with free stubs (n when none).
  std::vector<std::size_t> next_free(n + 1);
  std::iota(next_free.begin(), next_free.end(), 0);
  auto find = [&](std::size_t j) {
    while (next_free[j] != j) {
      next_free[j] = next_free[next_free[j]];
      j = next_free[j];
    }
    return j;
  };
  auto exhaust = [&](std::size_t j) { next_free[j] = j + 1; };

  using Entry = std::tuple<std::uint64_t, std::size_t, std::size_t>;  // product, i, j
  auto cmp = [](const Entry& a, const Entry& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    return std::tie(std::get<1>(a), std::get<2>(a)) > std::tie(std::get<1>(b), std::get<2>(b));
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
  for (std::size_t i = 0; i + 1 < n; ++i) heap.emplace(deg[i] * deg[i + 1], i, i + 1);

  double s_max = 0.0;
  while (!heap.empty()) {
    const auto [product, i, j] = heap.top();
    heap.pop();
    if (free_stubs[i] == 0) continue;
    const std::size_t partner = find(j);
    if (partner >= n) continue;
    if (partner != j) {
      heap.emplace(deg[i] * deg[partner], i, partner);
      continue;
    }
    s_max += static_cast<double>(product);
    if (--free_stubs[i] == 0) exhaust(i);
    if (--free_stubs[j] == 0) exhaust(j);
    if (free_stubs[i] > 0) {
      const std::size_t next = find(j + 1);
      if (next < n) heap.emplace(deg[i] * deg[next], i, next);
    }
  }
  out.normalized = out.raw / s_max;
  return out;
}

/// Greedy maximal independent set: nodes visited by ascending degree, ties
/// in a seed-keyed random order; a node joins when none of its neighbours
/// has. Returned ascending.
inline std::vector<NodeIndex> maximal_independent_set(const Graph& g, std::uint64_t seed) {
  const std::size_t n = g.node_count();
  std::vector<NodeIndex> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<NodeIndex>(order));
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeIndex a, NodeIndex b) { return g.degree(a) < g.degree(b); });

  std::vector<std::uint8_t> state(n, 0);  // 0 free, 1 in set, 2 blocked
  std::vector<NodeIndex> out;
  for (const NodeIndex u : order) {
    if (state[u] != 0) continue;
    state[u] = 1;
    out.push_back(u);
    for (const NodeIndex v : g.neighbors(u)) state[v] = 2;
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

// Sources are split into this many fixed chunks; chunk partials are summed
// in chunk order so the result is identical for every thread count.
inline constexpr std::size_t kBetweennessChunks = 64;

/// Unweighted betweenness over the live nodes (all nodes if `alive` is
/// empty). Each unordered pair is counted once; endpoints are excluded.
/// A non-empty `sources` mask restricts the traversal roots; values are then
/// exact only for nodes whose whole component is in the mask.
inline std::vector<double> betweenness_values(const Graph& g, std::span<const std::uint8_t> alive,
                                              unsigned threads,
                                              std::span<const std::uint8_t> sources = {}) {
  const std::size_t n = g.node_count();
  const std::size_t chunks = std::min(kBetweennessChunks, std::max<std::size_t>(n, 1));
  const std::size_t per_chunk = (n + chunks - 1) / chunks;
  std::vector<std::vector<double>> partial(chunks);

  // Dead nodes sit at a negative distance that never matches a BFS layer.
  constexpr std::int32_t kDead = -2;
  parallel_for(chunks, threads, [&](std::size_t c) {
    auto& acc = partial[c];
    acc.assign(n, 0.0);
    std::vector<std::int32_t> dist(n, kUnreachable);
    if (!alive.empty()) {
      for (std::size_t v = 0; v < n; ++v) {
        if (!alive[v]) dist[v] = kDead;
      }
    }
    std::vector<double> sigma(n, 0.0), delta(n, 0.0);
    std::vector<NodeIndex> order;
    order.reserve(n);
    const std::size_t begin = c * per_chunk;
    const std::size_t end = std::min(n, begin + per_chunk);
    for (std::size_t si = begin; si < end; ++si) {
      const auto s = static_cast<NodeIndex>(si);
      if (dist[s] == kDead) continue;
      if (!sources.empty() && !sources[s]) continue;
      if (g.degree(s) == 0) continue;
      order.clear();
      dist[s] = 0;
      sigma[s] = 1.0;
      order.push_back(s);
      for (std::size_t head = 0; head < order.size(); ++head) {
        const NodeIndex v = order[head];
        const std::int32_t next = dist[v] + 1;
        const double sv = sigma[v];
        for (const NodeIndex w : g.neighbors(v)) {
          if (dist[w] == kUnreachable) {
            dist[w] = next;
            order.push_back(w);
          }
          if (dist[w] == next) sigma[w] += sv;
        }
      }
      for (std::size_t k = order.size(); k-- > 0;) {
        const NodeIndex w = order[k];
        const std::int32_t prev = dist[w] - 1;
        const double coeff = (1.0 + delta[w]) / sigma[w];
        for (const NodeIndex v : g.neighbors(w)) {
          if (dist[v] == prev) delta[v] += sigma[v] * coeff;
        }
        if (w != s) acc[w] += delta[w];
      }
      for (const NodeIndex v : order) {
        dist[v] = kUnreachable;
        sigma[v] = 0.0;
        delta[v] = 0.0;
      }
    }
  });

  std::vector<double> out(n, 0.0);
  for (const auto& acc : partial) {
    for (std::size_t v = 0; v < n; ++v) out[v] += acc[v];
  }
  for (auto& v : out) v *= 0.5;
  return out;
}

}  // namespace detail

/// Exact shortest-path betweenness (Brandes accumulation).
inline CentralityScores betweenness(const Graph& g, unsigned threads = 1) {
  return {CentralityKind::Betweenness, g.nodes(), detail::betweenness_values(g, {}, threads)};
}

/// CC(u) = N / Σ_v d(u, v) with N the size of u's component; 0 for
/// isolated nodes.
inline CentralityScores closeness(const Graph& g) {
  CentralityScores out{CentralityKind::Closeness, g.nodes(), std::vector<double>(g.node_count(), 0.0)};
  for (NodeIndex u = 0; u < g.node_count(); ++u) {
    if (g.degree(u) == 0) continue;
    const auto dist = hop_distances(g, u);
    std::uint64_t sum = 0, reach = 0;
    for (const auto d : dist) {
      if (d == kUnreachable) continue;
      sum += static_cast<std::uint64_t>(d);
      ++reach;
    }
    out.values[u] = static_cast<double>(reach) / static_cast<double>(sum);
  }
  return out;
}

inline CentralityScores degree_centrality(const Graph& g) {
  CentralityScores out{CentralityKind::Degree, g.nodes(), std::vector<double>(g.node_count())};
  for (NodeIndex u = 0; u < g.node_count(); ++u) out.values[u] = static_cast<double>(g.degree(u));
  return out;
}

/// Every summary statistic at once. Metrics that are undefined on the
/// input are left empty instead of failing the report.
struct SummaryReport {
  std::size_t node_count = 0;
  std::size_t channel_count = 0;  // raw channels before collapsing
  std::size_t edge_count = 0;
  std::optional<double> average_degree_std;    // 2|E| / |V|
  std::optional<double> average_degree_paper;  // |E| / |V|
  std::size_t component_count = 0;
  std::optional<double> density;
  double total_capacity_btc = 0.0;
  std::optional<double> s_metric_raw;
  std::optional<double> s_metric_normalized;
  std::size_t mis_size = 0;
  std::size_t bridge_count = 0;
  std::optional<std::int32_t> diameter;
  std::optional<std::int32_t> radius;
  std::optional<double> mean_shortest_path;
  std::optional<double> transitivity;
  std::optional<double> avg_clustering;
  std::optional<double> degree_assortativity;
};

inline constexpr double kSatoshiPerBtc = 1e8;

namespace detail {

template <typename F>
auto defined(F&& f) -> std::optional<decltype(f())> {
  try {
    return f();
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

}  // namespace detail

inline SummaryReport summarize(const Graph& g, std::size_t raw_channel_count, std::uint64_t seed = 0) {
  SummaryReport r;
  r.node_count = g.node_count();
  r.channel_count = raw_channel_count;
  r.edge_count = g.edge_count();
  if (!g.empty()) {
    const auto n = static_cast<double>(g.node_count());
    r.average_degree_std = 2.0 * static_cast<double>(g.edge_count()) / n;
    r.average_degree_paper = static_cast<double>(g.edge_count()) / n;
  }
  r.component_count = component_count(g);
  r.density = detail::defined([&] { return density(g); });
  r.total_capacity_btc = static_cast<double>(g.total_capacity()) / kSatoshiPerBtc;
  if (const auto s = detail::defined([&] { return s_metric(g); })) {
    r.s_metric_raw = s->raw;
    r.s_metric_normalized = s->normalized;
  }
  r.mis_size = maximal_independent_set(g, seed).size();
  r.bridge_count = bridge_indices(g).size();
  if (const auto d = detail::defined([&] { return distance_summary(g); })) {
    r.diameter = d->diameter;
    r.radius = d->radius;
    r.mean_shortest_path = d->mean_shortest_path;
  }
  r.transitivity = detail::defined([&] { return transitivity(g); });
  r.avg_clustering = detail::defined([&] { return average_clustering(g); });
  r.degree_assortativity = detail::defined([&] { return degree_assortativity(g); });
  return r;
}

}  // namespace lntopo::metrics
