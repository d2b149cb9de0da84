#pragma once

// Snapshot and edge-list readers, edge-list writer, and seeded synthetic
// graph generators.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lntopo/error.hpp"
#include "lntopo/graph.hpp"
#include "lntopo/powerlaw.hpp"
#include "lntopo/random.hpp"

namespace lntopo::ingest {

struct SnapshotNode {
  std::string pub_key;
  std::optional<std::string> alias;
};

struct SnapshotChannel {
  std::string channel_id;
  std::string node1;
  std::string node2;
  std::uint64_t capacity_sat = 0;
};

struct Snapshot {
  std::vector<SnapshotNode> nodes;
  std::vector<SnapshotChannel> channels;

  /// Collapsed graph; unknown channel endpoints raise StructuralError.
  Graph to_graph() const {
    std::vector<NodeId> ids;
    ids.reserve(nodes.size());
    for (const auto& n : nodes) ids.emplace_back(n.pub_key);
    std::vector<RawEdge> raw;
    raw.reserve(channels.size());
    for (const auto& c : channels) raw.push_back({NodeId(c.node1), NodeId(c.node2), c.capacity_sat});
    return Graph::build(ids, raw);
  }
};

namespace detail {

inline std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline std::optional<std::uint64_t> parse_u64(std::string_view text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) return std::nullopt;
  return value;
}

// First present key among the aliases.
inline const nlohmann::json* lookup(const nlohmann::json& record, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    const auto it = record.find(key);
    if (it != record.end() && !it->is_null()) return &*it;
  }
  return nullptr;
}

inline std::string require_string(const nlohmann::json& record, std::initializer_list<const char*> keys,
                                  const char* what, const char* kind, std::size_t index) {
  const auto* field = lookup(record, keys);
  if (field == nullptr) {
    throw FieldError(std::string(kind) + " " + std::to_string(index) + ": missing field '" + what + "'", index);
  }
  if (field->is_string()) return field->get<std::string>();
  if (field->is_number_integer()) return field->dump();
  throw FieldError(std::string(kind) + " " + std::to_string(index) + ": field '" + what + "' is not a string", index);
}

inline std::uint64_t require_capacity(const nlohmann::json& record, std::size_t index) {
  const auto* field = lookup(record, {"capacity", "capacity_sat", "satoshis", "amount_sat"});
  const auto where = "edge " + std::to_string(index);
  if (field == nullptr) throw FieldError(where + ": missing field 'capacity'", index);
  if (field->is_number_unsigned()) return field->get<std::uint64_t>();
  if (field->is_number_integer()) {
    const auto v = field->get<std::int64_t>();
    if (v < 0) throw FieldError(where + ": negative capacity", index);
    return static_cast<std::uint64_t>(v);
  }
  if (field->is_string()) {
    if (const auto v = parse_u64(field->get<std::string>())) return *v;
  }
  throw FieldError(where + ": capacity is not a non-negative integer", index);
}

}  // namespace detail

/// Reads a "describegraph"-style JSON document:
///   {"nodes": [{"pub_key", "alias"?}], "edges": [{"channel_id", "node1_pub",
///    "node2_pub", "capacity"}]}
/// Capacities may be numbers or numeric strings. Unknown fields are ignored
/// and a few common field-name variants are accepted.
inline Snapshot parse_snapshot(std::string_view bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed snapshot: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw ParseError("snapshot must be a JSON object", 0);

  const auto* nodes = detail::lookup(doc, {"nodes", "vertices"});
  const auto* edges = detail::lookup(doc, {"edges", "channels"});
  if (nodes == nullptr || !nodes->is_array()) throw FieldError("snapshot has no 'nodes' array", 0);
  if (edges == nullptr || !edges->is_array()) throw FieldError("snapshot has no 'edges' array", 0);

  Snapshot out;
  out.nodes.reserve(nodes->size());
  for (std::size_t i = 0; i < nodes->size(); ++i) {
    const auto& rec = (*nodes)[i];
    if (!rec.is_object()) throw FieldError("node " + std::to_string(i) + " is not an object", i);
    SnapshotNode node;
    node.pub_key = detail::to_lower(detail::require_string(rec, {"pub_key", "pubkey", "node_id", "id"}, "pub_key", "node", i));
    if (node.pub_key.empty()) throw FieldError("node " + std::to_string(i) + ": empty pub_key", i);
    if (const auto* alias = detail::lookup(rec, {"alias"}); alias != nullptr && alias->is_string()) {
      node.alias = alias->get<std::string>();
    }
    out.nodes.push_back(std::move(node));
  }

  out.channels.reserve(edges->size());
  for (std::size_t i = 0; i < edges->size(); ++i) {
    const auto& rec = (*edges)[i];
    if (!rec.is_object()) throw FieldError("edge " + std::to_string(i) + " is not an object", i);
    SnapshotChannel ch;
    if (detail::lookup(rec, {"channel_id", "short_channel_id", "chan_id", "scid"}) != nullptr) {
      ch.channel_id = detail::require_string(rec, {"channel_id", "short_channel_id", "chan_id", "scid"}, "channel_id", "edge", i);
    } else {
      ch.channel_id = std::to_string(i);
    }
    ch.node1 = detail::to_lower(detail::require_string(rec, {"node1_pub", "node1", "source", "node_1"}, "node1_pub", "edge", i));
    ch.node2 = detail::to_lower(detail::require_string(rec, {"node2_pub", "node2", "destination", "target", "node_2"}, "node2_pub", "edge", i));
    ch.capacity_sat = detail::require_capacity(rec, i);
    out.channels.push_back(std::move(ch));
  }
  return out;
}

/// Reads whitespace-separated "u v capacity" lines. '#' starts a comment.
/// A line holding a single token declares an isolated node.
inline Snapshot parse_edge_list(std::string_view bytes) {
  Snapshot out;
  std::set<std::string> seen;
  auto note = [&](const std::string& id) {
    if (seen.insert(id).second) out.nodes.push_back({id, std::nullopt});
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= bytes.size()) {
    const auto eol = bytes.find('\n', pos);
    std::string_view line = bytes.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? bytes.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::vector<std::string> tokens;
    std::istringstream in{std::string(line)};
    for (std::string tok; in >> tok;) tokens.push_back(std::move(tok));
    if (tokens.empty()) continue;

    if (tokens.size() == 1) {
      note(tokens[0]);
      continue;
    }
    if (tokens.size() != 3) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'u v capacity'", line_no, true);
    }
    const auto cap = detail::parse_u64(tokens[2]);
    if (!cap) {
      throw ParseError("line " + std::to_string(line_no) + ": capacity '" + tokens[2] + "' is not a non-negative integer",
                       line_no, true);
    }
    note(tokens[0]);
    note(tokens[1]);
    out.channels.push_back({"L" + std::to_string(line_no), tokens[0], tokens[1], *cap});
  }
  return out;
}

/// Edge-list text for `g`: one "u v capacity" line per collapsed edge,
/// then one line per isolated node. parse_edge_list reads it back into the
/// same node set, edge set and capacities.
inline std::string write_edge_list(const Graph& g) {
  std::string out = "# nodes " + std::to_string(g.node_count()) + " edges " + std::to_string(g.edge_count()) + "\n";
  for (const auto& e : g.indexed_edges()) {
    out += g.id(e.u).str() + ' ' + g.id(e.v).str() + ' ' + std::to_string(e.capacity) + '\n';
  }
  for (NodeIndex u = 0; u < g.node_count(); ++u) {
    if (g.degree(u) == 0) out += g.id(u).str() + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generators

enum class GeneratorKind { BarabasiAlbert, ConfigurationPowerLaw, Star, ErdosRenyi };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Star;
  std::size_t n = 1;
  std::size_t m = 1;         // barabasi_albert attachment count
  double gamma = 2.5;        // configuration_powerlaw
  std::int64_t k_min = 1;
  std::int64_t k_max = 1;
  double p = 0.0;            // erdos_renyi
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1) throw DomainError("generator needs n >= 1");
    switch (kind) {
      case GeneratorKind::BarabasiAlbert:
        if (m < 1 || m + 1 > n) throw DomainError("barabasi_albert needs 1 <= m < n");
        break;
      case GeneratorKind::ConfigurationPowerLaw:
        if (!(gamma > 1.0)) throw DomainError("configuration_powerlaw needs gamma > 1");
        if (k_min < 1 || k_min > k_max || static_cast<std::uint64_t>(k_max) >= n) {
          throw DomainError("configuration_powerlaw needs 1 <= k_min <= k_max < n");
        }
        break;
      case GeneratorKind::ErdosRenyi:
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("erdos_renyi needs 0 <= p <= 1");
        break;
      case GeneratorKind::Star:
        break;
    }
  }
};

/// Parses "kind:key=value,..." e.g. "ba:n=2000,m=2", "star:n=200",
/// "er:n=30,p=0.3", "powerlaw:n=10000,gamma=2.5,kmin=1,kmax=100".
/// An optional "seed=" key overrides `default_seed`.
inline GeneratorSpec parse_generator_spec(std::string_view text, std::uint64_t default_seed = 0) {
  GeneratorSpec spec;
  spec.seed = default_seed;
  const auto colon = text.find(':');
  const std::string kind(text.substr(0, colon));
  if (kind == "ba" || kind == "barabasi_albert") {
    spec.kind = GeneratorKind::BarabasiAlbert;
  } else if (kind == "powerlaw" || kind == "configuration_powerlaw" || kind == "cm") {
    spec.kind = GeneratorKind::ConfigurationPowerLaw;
  } else if (kind == "star") {
    spec.kind = GeneratorKind::Star;
  } else if (kind == "er" || kind == "erdos_renyi") {
    spec.kind = GeneratorKind::ErdosRenyi;
  } else {
    throw std::invalid_argument("unknown generator kind '" + kind + "'");
  }
  bool kmax_given = false;
  if (colon != std::string_view::npos) {
    std::string rest(text.substr(colon + 1));
    std::istringstream in(rest);
    for (std::string item; std::getline(in, item, ',');) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("generator parameter '" + item + "' lacks '='");
      const std::string key = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      static const std::set<std::string> kKnown = {"n", "m", "gamma", "kmin", "k_min", "kmax", "k_max", "p", "seed"};
      if (!kKnown.contains(key)) throw std::invalid_argument("unknown generator parameter '" + key + "'");
      try {
        if (key == "n") spec.n = std::stoull(value);
        else if (key == "m") spec.m = std::stoull(value);
        else if (key == "gamma") spec.gamma = std::stod(value);
        else if (key == "kmin" || key == "k_min") spec.k_min = std::stoll(value);
        else if (key == "kmax" || key == "k_max") { spec.k_max = std::stoll(value); kmax_given = true; }
        else if (key == "p") spec.p = std::stod(value);
        else spec.seed = std::stoull(value);
      } catch (const std::logic_error&) {
        throw std::invalid_argument("bad value '" + value + "' for generator parameter '" + key + "'");
      }
    }
  }
  if (spec.kind == GeneratorKind::ConfigurationPowerLaw && !kmax_given && spec.n > 1) {
    spec.k_max = static_cast<std::int64_t>(spec.n - 1);
  }
  return spec;
}

/// n i.i.d. draws from P(k) ∝ k^(-gamma), k ≥ k_min.
inline std::vector<std::int64_t> sample_discrete_powerlaw(double gamma, std::int64_t k_min, std::size_t n,
                                                          std::uint64_t seed) {
  if (n == 0) return {};
  const powerlaw::DiscretePowerLawSampler sampler(gamma, k_min);
  Rng rng(seed);
  std::vector<std::int64_t> out(n);
  for (auto& x : out) x = sampler(rng);
  return out;
}

namespace detail {

inline std::vector<NodeId> numbered_ids(std::size_t n) {
  std::vector<NodeId> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.emplace_back(std::to_string(i));
  return ids;
}

inline Graph from_pairs(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  const auto ids = numbered_ids(n);
  std::vector<RawEdge> raw;
  raw.reserve(pairs.size());
  for (const auto& [a, b] : pairs) raw.push_back({ids[a], ids[b], 1});
  return Graph::build(ids, raw);
}

inline Graph barabasi_albert(const GeneratorSpec& spec, Rng& rng) {
  const std::size_t m = spec.m;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> endpoints;  // each node repeated once per incident edge
  for (std::size_t a = 0; a <= m; ++a) {
    for (std::size_t b = a + 1; b <= m; ++b) {
      pairs.emplace_back(a, b);
      endpoints.push_back(a);
      endpoints.push_back(b);
    }
  }
  std::vector<std::size_t> chosen;
  for (std::size_t t = m + 1; t < spec.n; ++t) {
    chosen.clear();
    while (chosen.size() < m) {
      const std::size_t target = endpoints[static_cast<std::size_t>(rng.index(endpoints.size()))];
      if (std::find(chosen.begin(), chosen.end(), target) == chosen.end()) chosen.push_back(target);
    }
    for (const std::size_t target : chosen) {
      pairs.emplace_back(t, target);
      endpoints.push_back(t);
      endpoints.push_back(target);
    }
  }
  return from_pairs(spec.n, pairs);
}

inline Graph configuration_powerlaw(const GeneratorSpec& spec, Rng& rng) {
  const powerlaw::DiscretePowerLawSampler sampler(spec.gamma, spec.k_min);
  std::vector<std::int64_t> degree(spec.n);
  std::int64_t total = 0;
  for (auto& d : degree) {
    d = sampler.truncated(rng, spec.k_max);
    total += d;
  }
  if (total % 2 != 0) {
    if (spec.k_min == spec.k_max) {
      // Every draw has the same parity; drop one stub instead.
      --degree.back();
    } else {
      // Redraw one degree until the parity flips.
      const auto i = static_cast<std::size_t>(rng.index(spec.n));
      const auto old = degree[i];
      do {
        degree[i] = sampler.truncated(rng, spec.k_max);
      } while ((degree[i] - old) % 2 == 0);
    }
  }

  std::vector<std::size_t> stubs;
  for (std::size_t u = 0; u < spec.n; ++u) stubs.insert(stubs.end(), static_cast<std::size_t>(degree[u]), u);
  rng.shuffle(std::span<std::size_t>(stubs));

  // Self-loops and repeated pairs are rejected; their stubs are dropped.
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    const auto a = std::min(stubs[i], stubs[i + 1]);
    const auto b = std::max(stubs[i], stubs[i + 1]);
    if (a == b || !seen.emplace(a, b).second) continue;
    pairs.emplace_back(a, b);
  }
  return from_pairs(spec.n, pairs);
}

}  // namespace detail

/// Deterministic synthetic graph; every edge has capacity 1.
/// barabasi_albert starts from a complete graph on m + 1 nodes, so it has
/// C(m+1, 2) + m (n - m - 1) edges.
inline Graph generate(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  switch (spec.kind) {
    case GeneratorKind::BarabasiAlbert:
      return detail::barabasi_albert(spec, rng);
    case GeneratorKind::ConfigurationPowerLaw:
      return detail::configuration_powerlaw(spec, rng);
    case GeneratorKind::Star: {
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t leaf = 1; leaf < spec.n; ++leaf) pairs.emplace_back(0, leaf);
      return detail::from_pairs(spec.n, pairs);
    }
    case GeneratorKind::ErdosRenyi: {
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t a = 0; a < spec.n; ++a) {
        for (std::size_t b = a + 1; b < spec.n; ++b) {
          if (rng.bernoulli(spec.p)) pairs.emplace_back(a, b);
        }
      }
      return detail::from_pairs(spec.n, pairs);
    }
  }
  throw DomainError("unknown generator kind");
}

}  // namespace lntopo::ingest
