#pragma once

// Serialisation of reports: flat JSON objects, fixed-precision CSV and the
// two-column summary table.

#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lntopo/metrics.hpp"
#include "lntopo/powerlaw.hpp"
#include "lntopo/robustness.hpp"

namespace lntopo::report {

using Json = nlohmann::ordered_json;

/// Six significant digits, the fixed numeric format of every CSV/table.
inline std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

template <typename T>
std::string format_optional(const std::optional<T>& value) {
  if (!value) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return format_real(*value);
  } else {
    return std::to_string(*value);
  }
}

template <typename T>
Json optional_json(const std::optional<T>& value) {
  return value ? Json(*value) : Json(nullptr);
}

/// Minimal CSV builder: header row first, then one row per record.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) { add_row(header); }

  void add_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }

  const std::string& str() const noexcept { return text_; }

 private:
  std::string text_;
};

inline Json to_json(const metrics::SummaryReport& r) {
  Json j;
  j["node_count"] = r.node_count;
  j["channel_count"] = r.channel_count;
  j["edge_count"] = r.edge_count;
  j["average_degree_std"] = optional_json(r.average_degree_std);
  j["average_degree_paper"] = optional_json(r.average_degree_paper);
  j["component_count"] = r.component_count;
  j["density"] = optional_json(r.density);
  j["total_capacity_btc"] = r.total_capacity_btc;
  j["s_metric_raw"] = optional_json(r.s_metric_raw);
  j["s_metric_normalized"] = optional_json(r.s_metric_normalized);
  j["mis_size"] = r.mis_size;
  j["bridge_count"] = r.bridge_count;
  j["diameter"] = optional_json(r.diameter);
  j["radius"] = optional_json(r.radius);
  j["mean_shortest_path"] = optional_json(r.mean_shortest_path);
  j["transitivity"] = optional_json(r.transitivity);
  j["avg_clustering"] = optional_json(r.avg_clustering);
  j["degree_assortativity"] = optional_json(r.degree_assortativity);
  return j;
}

/// Label/value rows in the order of the classic "network at a glance"
/// table, followed by the rows that table does not carry.
inline std::vector<std::pair<std::string, std::string>> summary_rows(const metrics::SummaryReport& r) {
  return {
      {"Number of nodes", std::to_string(r.node_count)},
      {"Number of payment channels", std::to_string(r.channel_count)},
      {"Average degree (|E|/|V|)", format_optional(r.average_degree_paper)},
      {"Connected components", std::to_string(r.component_count)},
      {"Density", format_optional(r.density)},
      {"Total BTC held in network", format_real(r.total_capacity_btc)},
      {"s-metric", format_optional(r.s_metric_normalized)},
      {"Maximal independent set", std::to_string(r.mis_size)},
      {"Bridges", std::to_string(r.bridge_count)},
      {"Diameter", format_optional(r.diameter)},
      {"Radius", format_optional(r.radius)},
      {"Mean shortest path", format_optional(r.mean_shortest_path)},
      {"Transitivity", format_optional(r.transitivity)},
      {"Average clustering coefficient", format_optional(r.avg_clustering)},
      {"Degree assortativity", format_optional(r.degree_assortativity)},
      {"Average degree (2|E|/|V|)", format_optional(r.average_degree_std)},
      {"Collapsed edges", std::to_string(r.edge_count)},
      {"s-metric (raw)", format_optional(r.s_metric_raw)},
  };
}

inline std::string to_table(const metrics::SummaryReport& r) {
  const auto rows = summary_rows(r);
  std::size_t width = 0;
  for (const auto& [label, value] : rows) width = std::max(width, label.size());
  std::string out;
  for (const auto& [label, value] : rows) {
    out += label;
    out.append(width - label.size() + 2, ' ');
    out += (value.empty() ? "null" : value);
    out += '\n';
  }
  return out;
}

inline std::string to_csv(const metrics::SummaryReport& r) {
  Csv csv({"metric", "value"});
  const Json j = to_json(r);
  for (const auto& [key, value] : j.items()) {
    if (value.is_null()) {
      csv.add_row({key, ""});
    } else if (value.is_number_float()) {
      csv.add_row({key, format_real(value.get<double>())});
    } else {
      csv.add_row({key, value.dump()});
    }
  }
  return csv.str();
}

inline Json to_json(const powerlaw::PowerLawFit& fit) {
  Json j;
  j["gamma"] = fit.gamma;
  j["k_min"] = fit.k_min;
  j["n_tail"] = fit.n_tail;
  j["ks_statistic"] = fit.ks_statistic;
  j["log_likelihood"] = fit.log_likelihood;
  j["low_confidence"] = fit.low_confidence;
  return j;
}

inline std::string curve_csv(const robustness::PercolationResult& result) {
  Csv csv({"fraction_removed", "giant_fraction"});
  for (const auto& p : result.curve) csv.add_row({format_real(p.fraction_removed), format_real(p.giant_fraction)});
  return csv.str();
}

inline Json curve_json(const robustness::PercolationResult& result) {
  Json j;
  j["strategy"] = robustness::to_string(result.strategy.kind);
  j["trials"] = result.trials;
  j["f_c"] = optional_json(result.f_c);
  Json curve = Json::array();
  for (const auto& p : result.curve) {
    curve.push_back({{"fraction_removed", p.fraction_removed}, {"giant_fraction", p.giant_fraction}});
  }
  j["curve"] = std::move(curve);
  return j;
}

}  // namespace lntopo::report
