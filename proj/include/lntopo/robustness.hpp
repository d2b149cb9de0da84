#pragma once

// Node-removal experiments: percolation curves under random failures and
// adaptive degree/betweenness attacks, hub fragmentation, liquidity loss,
// and periphery reinforcement.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lntopo/error.hpp"
#include "lntopo/graph.hpp"
#include "lntopo/metrics.hpp"
#include "lntopo/parallel.hpp"
#include "lntopo/random.hpp"

namespace lntopo::robustness {

enum class StrategyKind { RND, HDR, HBR };

inline const char* to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::RND: return "RND";
    case StrategyKind::HDR: return "HDR";
    case StrategyKind::HBR: return "HBR";
  }
  return "?";
}

/// RND draws a uniform removal order per trial. HDR and HBR remove the
/// node of highest current degree or betweenness, recomputed after every
/// removal; ties go to the node that comes first in a seed-keyed shuffle.
struct RemovalStrategy {
  StrategyKind kind = StrategyKind::RND;
  std::uint64_t seed = 0;
};

struct CurvePoint {
  double fraction_removed = 0.0;
  double giant_fraction = 0.0;  // giant size / original giant size
};

struct PercolationResult {
  std::vector<CurvePoint> curve;
  std::optional<double> f_c;  // empty: threshold not reached
  RemovalStrategy strategy;
  std::size_t trials = 1;
};

struct AttackStep {
  NodeId removed;
  std::size_t component_count = 0;
  std::size_t giant_size = 0;
  std::uint64_t remaining_capacity_sat = 0;
  std::optional<double> mean_shortest_path;  // on the giant; empty below 2 nodes
};

struct AttackReport {
  std::uint64_t original_capacity_sat = 0;
  std::vector<AttackStep> steps;
};

struct CapacityPoint {
  std::size_t nodes_removed = 0;
  double remaining_capacity_fraction = 0.0;
};

/// Random-failure threshold of a scale-free degree distribution with
/// 2 < gamma < 3 (Molloy-Reed):
///   f_c = 1 - 1 / (κ - 1),  κ = (gamma-2)/(3-gamma) · k_min^(gamma-2) · k_max^(3-gamma)
inline double molloy_reed_fc(double gamma, std::int64_t k_min, std::int64_t k_max) {
  if (!(gamma > 2.0 && gamma < 3.0)) throw DomainError("Molloy-Reed threshold needs 2 < gamma < 3");
  if (k_min < 1 || k_max < k_min) throw DomainError("Molloy-Reed threshold needs 1 <= k_min <= k_max");
  const double kappa = (gamma - 2.0) / (3.0 - gamma) * std::pow(static_cast<double>(k_min), gamma - 2.0) *
                       std::pow(static_cast<double>(k_max), 3.0 - gamma);
  const double denom = kappa - 1.0;
  if (!(denom > 0.0)) throw DomainError("Molloy-Reed threshold undefined: κ <= 1");
  return 1.0 - 1.0 / denom;
}

/// Size below which the giant counts as dissolved: 1% of its original
/// size, never less than 2 nodes.
inline double dissolution_size(std::size_t original_giant) {
  return std::max(0.01 * static_cast<double>(original_giant), 2.0);
}

/// rank[u] = position of u in a seed-keyed shuffle of the node order.
inline std::vector<std::uint32_t> tie_ranks(const Graph& g, std::uint64_t seed) {
  std::vector<NodeIndex> perm(g.node_count());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<NodeIndex>(perm));
  std::vector<std::uint32_t> rank(g.node_count());
  for (std::size_t i = 0; i < perm.size(); ++i) rank[perm[i]] = static_cast<std::uint32_t>(i);
  return rank;
}

inline std::vector<NodeIndex> random_order(const Graph& g, std::uint64_t seed) {
  std::vector<NodeIndex> order(g.node_count());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<NodeIndex>(order));
  return order;
}

/// Adaptive highest-degree order: after each removal the degrees of the
/// survivors are updated and the new maximum is taken. `rank` breaks ties.
inline std::vector<NodeIndex> hdr_order(const Graph& g, std::span<const std::uint32_t> rank) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> deg = g.degrees();
  std::vector<NodeIndex> by_rank(n);
  for (NodeIndex u = 0; u < n; ++u) by_rank[rank[u]] = u;

  // (degree desc, rank asc)
  std::set<std::pair<std::int64_t, std::uint32_t>> queue;
  for (NodeIndex u = 0; u < n; ++u) queue.emplace(-static_cast<std::int64_t>(deg[u]), rank[u]);
  std::vector<std::uint8_t> alive(n, 1);
  std::vector<NodeIndex> order;
  order.reserve(n);
  while (!queue.empty()) {
    const auto top = *queue.begin();
    queue.erase(queue.begin());
    const NodeIndex u = by_rank[top.second];
    alive[u] = 0;
    order.push_back(u);
    for (const NodeIndex v : g.neighbors(u)) {
      if (!alive[v]) continue;
      queue.erase({-static_cast<std::int64_t>(deg[v]), rank[v]});
      --deg[v];
      queue.emplace(-static_cast<std::int64_t>(deg[v]), rank[v]);
    }
  }
  return order;
}

inline std::vector<NodeIndex> hdr_order(const Graph& g, std::uint64_t seed) {
  const auto rank = tie_ranks(g, seed);
  return hdr_order(g, rank);
}

/// Adaptive highest-betweenness order, recomputing exact betweenness on
/// the surviving graph after every removal. Scores within a relative 1e-9
/// of the maximum count as tied. Once no edges survive, the remaining
/// nodes all score 0 and follow rank order.
inline std::vector<NodeIndex> hbr_order(const Graph& g, std::uint64_t seed, unsigned threads = 1) {
  const std::size_t n = g.node_count();
  const auto rank = tie_ranks(g, seed);
  std::vector<std::uint8_t> alive(n, 1);
  std::vector<std::size_t> live_degree = g.degrees();
  std::size_t live_edges = g.edge_count();
  std::vector<NodeIndex> order;
  order.reserve(n);

  // Scores only change inside the component that lost a node, so each
  // step re-roots Brandes on that component alone.
  std::vector<double> bc = metrics::detail::betweenness_values(g, alive, threads);
  std::vector<std::uint8_t> dirty(n, 0);
  std::vector<NodeIndex> queue;
  while (live_edges > 0) {
    double best = 0.0;
    for (NodeIndex u = 0; u < n; ++u) {
      if (alive[u]) best = std::max(best, bc[u]);
    }
    const double floor = best - 1e-9 * std::max(1.0, best);
    NodeIndex pick = 0;
    std::uint32_t pick_rank = std::numeric_limits<std::uint32_t>::max();
    for (NodeIndex u = 0; u < n; ++u) {
      if (alive[u] && bc[u] >= floor && rank[u] < pick_rank) {
        pick = u;
        pick_rank = rank[u];
      }
    }
    alive[pick] = 0;
    order.push_back(pick);
    live_edges -= live_degree[pick];
    queue.clear();
    for (const NodeIndex v : g.neighbors(pick)) {
      if (!alive[v]) continue;
      --live_degree[v];
      if (!dirty[v]) {
        dirty[v] = 1;
        queue.push_back(v);
      }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (const NodeIndex w : g.neighbors(queue[head])) {
        if (alive[w] && !dirty[w]) {
          dirty[w] = 1;
          queue.push_back(w);
        }
      }
    }
    if (queue.empty()) continue;
    const auto fresh = metrics::detail::betweenness_values(g, alive, threads, dirty);
    for (const NodeIndex v : queue) {
      bc[v] = fresh[v];
      dirty[v] = 0;
    }
  }

  std::vector<NodeIndex> rest;
  for (NodeIndex u = 0; u < n; ++u) {
    if (alive[u]) rest.push_back(u);
  }
  std::sort(rest.begin(), rest.end(), [&](NodeIndex a, NodeIndex b) { return rank[a] < rank[b]; });
  order.insert(order.end(), rest.begin(), rest.end());
  return order;
}

/// sizes[r] = largest component after removing order[0..r). Computed by
/// re-inserting nodes in reverse with union-find.
inline std::vector<std::size_t> giant_sizes_along(const Graph& g, std::span<const NodeIndex> order) {
  const std::size_t n = g.node_count();
  if (order.size() != n) throw DomainError("removal order must cover every node");
  std::vector<NodeIndex> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<std::size_t> size(n, 1);
  std::vector<std::uint8_t> active(n, 0);
  auto root = [&](NodeIndex x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  std::vector<std::size_t> sizes(n + 1, 0);
  std::size_t giant = 0;
  for (std::size_t r = n; r-- > 0;) {
    const NodeIndex u = order[r];
    active[u] = 1;
    giant = std::max<std::size_t>(giant, 1);
    for (const NodeIndex v : g.neighbors(u)) {
      if (!active[v]) continue;
      auto a = root(u), b = root(v);
      if (a == b) continue;
      if (size[a] < size[b]) std::swap(a, b);
      parent[b] = a;
      size[a] += size[b];
      giant = std::max(giant, size[a]);
    }
    sizes[r] = giant;
  }
  return sizes;
}

/// Removes nodes per `strategy` and samples the giant-component fraction on
/// a grid of removed fractions 0, step, 2·step, ..., 1. RND curves are
/// averaged pointwise over `trials` (trial t seeded with child_seed(seed,
/// t)); HDR and HBR are deterministic and always run once. f_c is the first
/// positive grid fraction, with at least two nodes left, at which the
/// (mean) giant size falls below dissolution_size(). A graph whose last
/// survivors all stay connected, such as a clique, never reaches it.
inline PercolationResult percolate(const Graph& g, RemovalStrategy strategy, std::size_t trials, double step,
                                   unsigned threads = 1) {
  if (g.empty()) throw DomainError("percolation on an empty graph");
  if (trials < 1) throw DomainError("percolation needs at least one trial");
  if (!(step > 0.0 && step <= 0.05)) throw DomainError("percolation step must lie in (0, 0.05]");
  if (strategy.kind != StrategyKind::RND) trials = 1;

  const std::size_t n = g.node_count();
  const std::size_t original_giant = connected_components(g).front().size();
  const auto points = static_cast<std::size_t>(std::ceil(1.0 / step - 1e-9));
  std::vector<double> fraction(points + 1);
  std::vector<std::size_t> removed(points + 1);
  for (std::size_t k = 0; k <= points; ++k) {
    fraction[k] = std::min(1.0, static_cast<double>(k) * step);
    removed[k] = std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(fraction[k] * static_cast<double>(n))));
  }

  std::vector<std::vector<std::size_t>> per_trial(trials);
  auto run_trial = [&](std::size_t t) {
    std::vector<NodeIndex> order;
    switch (strategy.kind) {
      case StrategyKind::RND: order = random_order(g, child_seed(strategy.seed, t)); break;
      case StrategyKind::HDR: order = hdr_order(g, strategy.seed); break;
      case StrategyKind::HBR: order = hbr_order(g, strategy.seed, threads); break;
    }
    per_trial[t] = giant_sizes_along(g, order);
  };
  if (strategy.kind == StrategyKind::RND) {
    parallel_for(trials, threads, run_trial);
  } else {
    run_trial(0);
  }

  PercolationResult out;
  out.strategy = strategy;
  out.trials = trials;
  const double cutoff = dissolution_size(original_giant);
  for (std::size_t k = 0; k <= points; ++k) {
    double mean = 0.0;
    for (const auto& sizes : per_trial) mean += static_cast<double>(sizes[removed[k]]);
    mean /= static_cast<double>(trials);
    out.curve.push_back({fraction[k], mean / static_cast<double>(original_giant)});
    if (!out.f_c && k > 0 && removed[k] + 2 <= n && mean < cutoff) out.f_c = fraction[k];
  }
  return out;
}

namespace detail {

// Largest current degree among live nodes; ties go to the smaller index.
inline NodeIndex max_degree_node(const Graph& g, std::span<const std::uint8_t> alive,
                                 std::span<const std::size_t> live_degree) {
  NodeIndex best = 0;
  bool found = false;
  for (NodeIndex u = 0; u < g.node_count(); ++u) {
    if (!alive[u]) continue;
    if (!found || live_degree[u] > live_degree[best]) {
      best = u;
      found = true;
    }
  }
  return best;
}

inline std::optional<double> mean_path_on_giant(const Graph& g, std::span<const std::uint8_t> alive,
                                                std::span<const std::uint32_t> label, std::uint32_t giant_label,
                                                std::size_t giant_size) {
  if (giant_size < 2) return std::nullopt;
  std::uint64_t total = 0;
  for (NodeIndex s = 0; s < g.node_count(); ++s) {
    if (!alive[s] || label[s] != giant_label) continue;
    for (const auto d : hop_distances(g, s, alive)) {
      if (d > 0) total += static_cast<std::uint64_t>(d);
    }
  }
  const auto size = static_cast<double>(giant_size);
  return static_cast<double>(total) / (size * (size - 1.0));
}

}  // namespace detail

/// Removes the current highest-degree node `count` times (degrees
/// recomputed after every removal, ties by NodeId) and records the
/// fragmentation after each removal.
inline AttackReport hub_removal_cumulative(const Graph& g, std::size_t count) {
  if (count > g.node_count()) throw DomainError("cannot remove more nodes than the graph has");
  const std::size_t n = g.node_count();
  std::vector<std::uint8_t> alive(n, 1);
  std::vector<std::size_t> live_degree = g.degrees();
  std::vector<std::uint32_t> label;

  AttackReport report;
  report.original_capacity_sat = g.total_capacity();
  std::uint64_t capacity = report.original_capacity_sat;
  for (std::size_t step = 0; step < count; ++step) {
    const NodeIndex hub = detail::max_degree_node(g, alive, live_degree);
    alive[hub] = 0;
    for (const NodeIndex v : g.neighbors(hub)) {
      if (alive[v]) --live_degree[v];
    }
    for (const auto& e : g.indexed_edges()) {
      if ((e.u == hub && alive[e.v]) || (e.v == hub && alive[e.u])) capacity -= e.capacity;
    }

    AttackStep s;
    s.removed = g.id(hub);
    s.component_count = label_components(g, label, alive);
    std::vector<std::size_t> sizes(s.component_count, 0);
    for (NodeIndex u = 0; u < n; ++u) {
      if (alive[u]) ++sizes[label[u]];
    }
    std::uint32_t giant_label = 0;
    for (std::uint32_t c = 0; c < sizes.size(); ++c) {
      if (sizes[c] > sizes[giant_label]) giant_label = c;
    }
    s.giant_size = sizes.empty() ? 0 : sizes[giant_label];
    s.remaining_capacity_sat = capacity;
    s.mean_shortest_path = detail::mean_path_on_giant(g, alive, label, giant_label, s.giant_size);
    report.steps.push_back(std::move(s));
  }
  return report;
}

/// The `top_k` highest-degree nodes of the original graph (ties by NodeId);
/// for each, the component count after removing only that node.
inline std::vector<std::pair<NodeId, std::size_t>> hub_removal_single(const Graph& g, std::size_t top_k) {
  if (top_k > g.node_count()) throw DomainError("top_k exceeds the node count");
  std::vector<NodeIndex> hubs(g.node_count());
  std::iota(hubs.begin(), hubs.end(), 0);
  std::stable_sort(hubs.begin(), hubs.end(), [&](NodeIndex a, NodeIndex b) { return g.degree(a) > g.degree(b); });
  hubs.resize(top_k);

  std::vector<std::uint8_t> alive(g.node_count(), 1);
  std::vector<std::uint32_t> label;
  std::vector<std::pair<NodeId, std::size_t>> out;
  for (const NodeIndex hub : hubs) {
    alive[hub] = 0;
    out.emplace_back(g.id(hub), label_components(g, label, alive));
    alive[hub] = 1;
  }
  return out;
}

/// Fraction of the original capacity carried by edges whose endpoints are
/// both still present, after removing order[0..r) for r = 0..|order|. A
/// graph without capacity reports 1 before any removal and 0 after.
inline std::vector<CapacityPoint> capacity_degradation(const Graph& g, std::span<const NodeIndex> order) {
  const std::uint64_t total = g.total_capacity();
  std::vector<std::vector<std::size_t>> incident(g.node_count());
  const auto& edges = g.indexed_edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    incident[edges[i].u].push_back(i);
    incident[edges[i].v].push_back(i);
  }

  std::vector<std::uint8_t> gone(g.node_count(), 0);
  std::vector<CapacityPoint> out{{0, 1.0}};
  std::uint64_t remaining = total;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const NodeIndex u = order[r];
    if (gone[u]) throw DomainError("removal order repeats node " + g.id(u).str());
    gone[u] = 1;
    for (const auto i : incident[u]) {
      const auto other = edges[i].u == u ? edges[i].v : edges[i].u;
      if (!gone[other]) remaining -= edges[i].capacity;
    }
    const double fraction = total == 0 ? 0.0 : static_cast<double>(remaining) / static_cast<double>(total);
    out.push_back({r + 1, fraction});
  }
  return out;
}

/// Adds `new_edge_count` edges (capacity 1 sat) between uniformly sampled
/// distinct pairs of peripheral nodes, i.e. nodes with degree at most
/// `degree_threshold`. Existing edges are never duplicated.
inline Graph reinforce_periphery(const Graph& g, std::size_t degree_threshold, std::size_t new_edge_count,
                                 std::uint64_t seed) {
  std::vector<NodeIndex> periphery;
  for (NodeIndex u = 0; u < g.node_count(); ++u) {
    if (g.degree(u) <= degree_threshold) periphery.push_back(u);
  }
  if (periphery.size() < 2) throw DomainError("fewer than 2 peripheral nodes");

  const std::uint64_t p = periphery.size();
  std::uint64_t existing = 0;
  for (const auto& e : g.indexed_edges()) {
    if (g.degree(e.u) <= degree_threshold && g.degree(e.v) <= degree_threshold) ++existing;
  }
  const std::uint64_t available = p * (p - 1) / 2 - existing;
  if (new_edge_count > available) {
    throw DomainError("only " + std::to_string(available) + " peripheral pairs available, " +
                      std::to_string(new_edge_count) + " requested");
  }

  Rng rng(seed);
  std::set<std::pair<NodeIndex, NodeIndex>> added;
  std::vector<IndexedEdge> edges = g.indexed_edges();
  if (new_edge_count * 2 <= available) {
    while (added.size() < new_edge_count) {
      const auto a = periphery[static_cast<std::size_t>(rng.index(p))];
      const auto b = periphery[static_cast<std::size_t>(rng.index(p))];
      if (a == b || g.has_edge(a, b)) continue;
      if (added.emplace(std::min(a, b), std::max(a, b)).second) {
        edges.push_back({std::min(a, b), std::max(a, b), 1, 1});
      }
    }
  } else {
    std::vector<std::pair<NodeIndex, NodeIndex>> candidates;
    for (std::size_t i = 0; i < periphery.size(); ++i) {
      for (std::size_t j = i + 1; j < periphery.size(); ++j) {
        if (!g.has_edge(periphery[i], periphery[j])) candidates.emplace_back(periphery[i], periphery[j]);
      }
    }
    rng.shuffle(std::span(candidates));
    for (std::size_t i = 0; i < new_edge_count; ++i) {
      edges.push_back({candidates[i].first, candidates[i].second, 1, 1});
    }
  }
  return Graph::from_indexed(g.nodes(), std::move(edges));
}

}  // namespace lntopo::robustness
