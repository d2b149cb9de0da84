#pragma once

// Command-line front end. `run` is the whole program; tools/lntopo.cpp
// only forwards argv to it.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lntopo/error.hpp"
#include "lntopo/graph.hpp"
#include "lntopo/ingest.hpp"
#include "lntopo/metrics.hpp"
#include "lntopo/parallel.hpp"
#include "lntopo/powerlaw.hpp"
#include "lntopo/report.hpp"
#include "lntopo/robustness.hpp"

namespace lntopo::cli {

inline constexpr std::uint64_t kDefaultSeed = 42;

enum ExitCode : int { kOk = 0, kInputError = 1, kConfigError = 2, kDegenerateData = 3 };

struct RunConfig {
  std::string input;
  std::string input_format = "auto";  // auto | snapshot | edgelist
  std::string generate;
  std::uint64_t seed = kDefaultSeed;
  std::string output_dir = ".";
  std::string format = "json";  // json | csv | table
  std::size_t trials = 10;
  double step = 0.005;
  std::size_t bootstraps = 2500;
  std::size_t top_k = 30;
  unsigned threads = default_threads();
  // percolate / reinforce
  std::vector<std::string> strategies;
  std::optional<double> gamma;
  // attack
  std::string mode = "cumulative";
  // reinforce
  std::size_t degree_threshold = 2;
  std::optional<std::size_t> new_edges;
};

// Invalid flag combinations and values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedGraph {
  Graph graph;
  std::size_t raw_channel_count = 0;
};

namespace detail {

inline void write_file(const RunConfig& cfg, const std::string& name, const std::string& text,
                       std::ostream& out) {
  const auto path = std::filesystem::path(cfg.output_dir) / name;
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write " + path.string());
  file << text;
  out << "wrote " << path.string() << '\n';
}

inline std::string json_text(const report::Json& j) { return j.dump(2) + "\n"; }

inline LoadedGraph load(const RunConfig& cfg) {
  if (cfg.input.empty() == cfg.generate.empty()) {
    throw ConfigError("exactly one of --input or --generate is required");
  }
  if (!cfg.generate.empty()) {
    ingest::GeneratorSpec spec;
    try {
      spec = ingest::parse_generator_spec(cfg.generate, cfg.seed);
      spec.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("--generate: ") + e.what());
    }
    Graph g = ingest::generate(spec);
    const auto edges = g.edge_count();
    return {std::move(g), edges};
  }

  std::ifstream file(cfg.input, std::ios::binary);
  if (!file) throw ParseError("cannot read " + cfg.input, 0);
  const std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

  bool snapshot = cfg.input_format == "snapshot";
  if (cfg.input_format == "auto") {
    const auto first = bytes.find_first_not_of(" \t\r\n");
    snapshot = std::filesystem::path(cfg.input).extension() == ".json" ||
               (first != std::string::npos && bytes[first] == '{');
  }
  const auto parsed = snapshot ? ingest::parse_snapshot(bytes) : ingest::parse_edge_list(bytes);
  return {parsed.to_graph(), parsed.channels.size()};
}

inline std::vector<robustness::StrategyKind> strategies(const std::vector<std::string>& names,
                                                        std::vector<robustness::StrategyKind> fallback) {
  if (names.empty()) return fallback;
  std::vector<robustness::StrategyKind> out;
  for (const auto& name : names) {
    if (name == "RND" || name == "rnd") out.push_back(robustness::StrategyKind::RND);
    else if (name == "HDR" || name == "hdr") out.push_back(robustness::StrategyKind::HDR);
    else if (name == "HBR" || name == "hbr") out.push_back(robustness::StrategyKind::HBR);
    else throw ConfigError("unknown strategy '" + name + "'");
  }
  return out;
}

inline std::string lower(std::string s) { return ingest::detail::to_lower(std::move(s)); }

// Positive degrees of every node, plus the number of degree-zero nodes.
inline std::pair<std::vector<std::int64_t>, std::size_t> degree_samples(const Graph& g) {
  std::vector<std::int64_t> degrees;
  std::size_t zeros = 0;
  for (NodeIndex u = 0; u < g.node_count(); ++u) {
    if (g.degree(u) == 0) ++zeros;
    else degrees.push_back(static_cast<std::int64_t>(g.degree(u)));
  }
  return {std::move(degrees), zeros};
}

}  // namespace detail

inline int cmd_summarize(const RunConfig& cfg, std::ostream& out) {
  const auto loaded = detail::load(cfg);
  const auto summary = metrics::summarize(loaded.graph, loaded.raw_channel_count, cfg.seed);
  if (cfg.format == "table") {
    detail::write_file(cfg, "summary.txt", report::to_table(summary), out);
  } else if (cfg.format == "csv") {
    detail::write_file(cfg, "summary.csv", report::to_csv(summary), out);
  } else {
    detail::write_file(cfg, "summary.json", detail::json_text(report::to_json(summary)), out);
  }
  return kOk;
}

inline int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const auto loaded = detail::load(cfg);
  const auto [degrees, zeros] = detail::degree_samples(loaded.graph);
  const auto fit = powerlaw::select_kmin(degrees);
  const auto gof = powerlaw::gof_pvalue(degrees, fit, cfg.bootstraps, cfg.seed, cfg.threads);

  auto j = report::to_json(fit);
  j["p_value"] = gof.p_value;
  j["bootstrap_count"] = gof.bootstrap_count;
  j["precision"] = gof.precision;
  j["sample_count"] = degrees.size();
  j["zero_degree_nodes"] = zeros;
  j["seed"] = cfg.seed;
  detail::write_file(cfg, "fit.json", detail::json_text(j), out);

  report::Csv csv({"k", "count", "ccdf"});
  for (const auto& row : powerlaw::degree_ccdf(degrees)) {
    csv.add_row({std::to_string(row.k), std::to_string(row.count), report::format_real(row.ccdf)});
  }
  detail::write_file(cfg, "degree_ccdf.csv", csv.str(), out);
  return kOk;
}

inline int cmd_percolate(const RunConfig& cfg, std::ostream& out) {
  using robustness::StrategyKind;
  const auto loaded = detail::load(cfg);
  const auto kinds = detail::strategies(cfg.strategies, {StrategyKind::RND, StrategyKind::HDR, StrategyKind::HBR});

  report::Json thresholds;
  thresholds["seed"] = cfg.seed;
  thresholds["step"] = cfg.step;
  thresholds["node_count"] = loaded.graph.node_count();
  for (const auto kind : kinds) {
    const auto result = robustness::percolate(loaded.graph, {kind, cfg.seed}, cfg.trials, cfg.step, cfg.threads);
    const std::string name = detail::lower(robustness::to_string(kind));
    if (cfg.format == "json") {
      detail::write_file(cfg, "percolation_" + name + ".json", detail::json_text(report::curve_json(result)), out);
    } else {
      detail::write_file(cfg, "percolation_" + name + ".csv", report::curve_csv(result), out);
    }
    thresholds[robustness::to_string(kind)] = {
        {"f_c", report::optional_json(result.f_c)},
        {"reached", result.f_c.has_value()},
        {"trials", result.trials},
    };
  }

  if (cfg.gamma) {
    const auto [degrees, zeros] = detail::degree_samples(loaded.graph);
    if (degrees.empty()) throw DomainError("Molloy-Reed threshold needs nodes with positive degree");
    const auto [lo, hi] = std::minmax_element(degrees.begin(), degrees.end());
    thresholds["molloy_reed"] = {
        {"gamma", *cfg.gamma},
        {"k_min", *lo},
        {"k_max", *hi},
        {"f_c", robustness::molloy_reed_fc(*cfg.gamma, *lo, *hi)},
    };
  }
  detail::write_file(cfg, "thresholds.json", detail::json_text(thresholds), out);
  return kOk;
}

inline int cmd_attack(const RunConfig& cfg, std::ostream& out) {
  const auto loaded = detail::load(cfg);
  const Graph& g = loaded.graph;
  const std::size_t k = std::min(cfg.top_k, g.node_count());

  if (cfg.mode == "single") {
    report::Csv csv({"rank", "removed", "degree", "component_count"});
    report::Json rows = report::Json::array();
    std::size_t rank = 0;
    for (const auto& [id, count] : robustness::hub_removal_single(g, k)) {
      ++rank;
      const auto degree = g.degree(g.index_of(id));
      csv.add_row({std::to_string(rank), id.str(), std::to_string(degree), std::to_string(count)});
      rows.push_back({{"rank", rank}, {"removed", id.str()}, {"degree", degree}, {"component_count", count}});
    }
    if (cfg.format == "json") {
      detail::write_file(cfg, "attack.json", detail::json_text(rows), out);
    } else {
      detail::write_file(cfg, "attack.csv", csv.str(), out);
    }
    return kOk;
  }
  if (cfg.mode != "cumulative") throw ConfigError("--mode must be cumulative or single");

  const auto report = robustness::hub_removal_cumulative(g, k);
  const auto n = static_cast<double>(g.node_count());
  const std::size_t giant0 = g.empty() ? 0 : connected_components(g).front().size();
  const auto total = static_cast<double>(report.original_capacity_sat);
  auto capacity_fraction = [&](std::uint64_t sat) { return total == 0 ? 0.0 : static_cast<double>(sat) / total; };

  report::Csv csv({"step", "removed", "fraction_removed", "component_count", "giant_size", "giant_fraction",
                   "remaining_capacity_sat", "remaining_capacity_fraction", "mean_shortest_path"});
  report::Json rows = report::Json::array();
  for (std::size_t i = 0; i < report.steps.size(); ++i) {
    const auto& s = report.steps[i];
    const double frac = static_cast<double>(i + 1) / n;
    const double giant_frac = giant0 == 0 ? 0.0 : static_cast<double>(s.giant_size) / static_cast<double>(giant0);
    csv.add_row({std::to_string(i + 1), s.removed.str(), report::format_real(frac), std::to_string(s.component_count),
                 std::to_string(s.giant_size), report::format_real(giant_frac),
                 std::to_string(s.remaining_capacity_sat), report::format_real(capacity_fraction(s.remaining_capacity_sat)),
                 report::format_optional(s.mean_shortest_path)});
    rows.push_back({{"step", i + 1},
                    {"removed", s.removed.str()},
                    {"fraction_removed", frac},
                    {"component_count", s.component_count},
                    {"giant_size", s.giant_size},
                    {"giant_fraction", giant_frac},
                    {"remaining_capacity_sat", s.remaining_capacity_sat},
                    {"remaining_capacity_fraction", capacity_fraction(s.remaining_capacity_sat)},
                    {"mean_shortest_path", report::optional_json(s.mean_shortest_path)}});
  }
  if (cfg.format == "json") {
    detail::write_file(cfg, "attack.json", detail::json_text(rows), out);
  } else {
    detail::write_file(cfg, "attack.csv", csv.str(), out);
  }

  // Liquidity loss along the full adaptive high-degree order.
  const auto order = robustness::hdr_order(g, cfg.seed);
  report::Csv cap({"nodes_removed", "fraction_removed", "remaining_capacity_fraction"});
  for (const auto& p : robustness::capacity_degradation(g, order)) {
    cap.add_row({std::to_string(p.nodes_removed), report::format_real(static_cast<double>(p.nodes_removed) / n),
                 report::format_real(p.remaining_capacity_fraction)});
  }
  detail::write_file(cfg, "capacity.csv", cap.str(), out);
  return kOk;
}

inline int cmd_reinforce(const RunConfig& cfg, std::ostream& out) {
  using robustness::StrategyKind;
  const auto loaded = detail::load(cfg);
  const Graph& g = loaded.graph;
  const std::size_t added = cfg.new_edges.value_or(std::max<std::size_t>(1, g.edge_count() / 20));
  const Graph reinforced = robustness::reinforce_periphery(g, cfg.degree_threshold, added, cfg.seed);

  report::Json j;
  j["seed"] = cfg.seed;
  j["degree_threshold"] = cfg.degree_threshold;
  j["new_edges"] = added;
  j["edges_before"] = g.edge_count();
  j["edges_after"] = reinforced.edge_count();
  for (const auto kind : detail::strategies(cfg.strategies, {StrategyKind::HDR})) {
    const auto before = robustness::percolate(g, {kind, cfg.seed}, cfg.trials, cfg.step, cfg.threads);
    const auto after = robustness::percolate(reinforced, {kind, cfg.seed}, cfg.trials, cfg.step, cfg.threads);
    j[robustness::to_string(kind)] = {
        {"f_c_before", report::optional_json(before.f_c)},
        {"f_c_after", report::optional_json(after.f_c)},
    };
  }
  detail::write_file(cfg, "reinforce.json", detail::json_text(j), out);
  detail::write_file(cfg, "reinforced.edges", ingest::write_edge_list(reinforced), out);
  return kOk;
}

inline int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.generate.empty() || !cfg.input.empty()) throw ConfigError("generate needs --generate and no --input");
  const auto loaded = detail::load(cfg);
  detail::write_file(cfg, "graph.edges", ingest::write_edge_list(loaded.graph), out);
  return kOk;
}

/// Parses argv, runs one subcommand and maps failures to exit codes:
/// 1 unreadable or malformed input, 2 invalid configuration, 3 data on
/// which the requested analysis is undefined.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Topology, scale-free fitting and robustness analysis of payment-channel networks", "lntopo"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  app.add_option("--input", cfg.input, "Snapshot JSON or edge-list file");
  app.add_option("--input-format", cfg.input_format, "auto, snapshot or edgelist")
      ->check(CLI::IsMember({"auto", "snapshot", "edgelist"}));
  app.add_option("--generate", cfg.generate, "Synthetic input, e.g. ba:n=2000,m=2");
  app.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  app.add_option("--out", cfg.output_dir, "Output directory")->capture_default_str();
  app.add_option("--format", cfg.format, "json, csv or table")
      ->check(CLI::IsMember({"json", "csv", "table"}))
      ->capture_default_str();
  app.add_option("--trials", cfg.trials, "Random-failure trials")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--step", cfg.step, "Removed-fraction grid step, in (0, 0.05]")->capture_default_str();
  app.add_option("--bootstraps", cfg.bootstraps, "Goodness-of-fit bootstrap replicates")->capture_default_str();
  app.add_option("--top-k", cfg.top_k, "Hubs removed by attack")->capture_default_str();
  app.add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* summarize = app.add_subcommand("summarize", "Summary statistics table");
  auto* fit = app.add_subcommand("fit", "Power-law fit of the degree distribution with bootstrap p-value");
  auto* percolate = app.add_subcommand("percolate", "Percolation curves and thresholds");
  percolate->add_option("--strategies", cfg.strategies, "Subset of RND,HDR,HBR")->delimiter(',');
  percolate->add_option("--gamma", cfg.gamma, "Exponent for the analytic Molloy-Reed threshold");
  auto* attack = app.add_subcommand("attack", "Hub-removal fragmentation and liquidity loss");
  attack->add_option("--mode", cfg.mode, "cumulative or single")->check(CLI::IsMember({"cumulative", "single"}));
  auto* reinforce = app.add_subcommand("reinforce", "Connect peripheral nodes and compare thresholds");
  reinforce->add_option("--degree-threshold", cfg.degree_threshold, "Peripheral nodes have degree <= this");
  reinforce->add_option("--new-edges", cfg.new_edges, "Edges to add (default 5% of |E|)");
  reinforce->add_option("--strategies", cfg.strategies, "Subset of RND,HDR,HBR")->delimiter(',');
  auto* generate = app.add_subcommand("generate", "Write a synthetic graph as an edge list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (!(cfg.step > 0.0 && cfg.step <= 0.05)) throw ConfigError("--step must lie in (0, 0.05]");
    if (cfg.bootstraps < 100) throw ConfigError("--bootstraps must be at least 100");
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + cfg.output_dir);

    if (summarize->parsed()) return cmd_summarize(cfg, out);
    if (fit->parsed()) return cmd_fit(cfg, out);
    if (percolate->parsed()) return cmd_percolate(cfg, out);
    if (attack->parsed()) return cmd_attack(cfg, out);
    if (reinforce->parsed()) return cmd_reinforce(cfg, out);
    if (generate->parsed()) return cmd_generate(cfg, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const FieldError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DomainError& e) {
    err << "error: degenerate data: " << e.what() << '\n';
    return kDegenerateData;
  }
  return kConfigError;
}

}  // namespace lntopo::cli
