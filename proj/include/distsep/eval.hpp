// Copyright 2026 The distsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "distsep/danse.hpp"
#include "distsep/errors.hpp"
#include "distsep/scene.hpp"

namespace distsep {

// Scale-invariant signal-to-distortion ratio in dB. The reference is first
// rescaled by the least-squares projection coefficient, so any nonzero
// rescaling of the estimate leaves the value unchanged. Perfect (or
// numerically exact) reconstruction is capped at +100 dB; a fully orthogonal
// estimate is floored at -100 dB.
inline double si_sdr(const std::vector<double>& estimate,
                     const std::vector<double>& reference) {
  if (estimate.size() != reference.size())
    throw FormatError("si_sdr: length mismatch (" +
                      std::to_string(estimate.size()) + " vs " +
                      std::to_string(reference.size()) + ")");
  if (estimate.empty()) throw FormatError("si_sdr: empty input");

  double dot = 0.0, ref_energy = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    dot += estimate[i] * reference[i];
    ref_energy += reference[i] * reference[i];
  }
  if (ref_energy == 0.0) throw MetricError("si_sdr: reference is all-zero");

  const double alpha = dot / ref_energy;
  double signal = 0.0, error = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double s = alpha * reference[i];
    const double e = s - estimate[i];
    signal += s * s;
    error += e * e;
  }
  if (signal == 0.0) return -100.0;
  if (error == 0.0) return 100.0;
  return std::min(100.0, 10.0 * std::log10(signal / error));
}

struct MetricsRecord {
  std::string scene_id;
  int node_id = 0;
  int n_sources = 0;
  int n_nodes = 0;
  std::string method;
  double si_sdr_in_db = 0.0;
  double si_sdr_out_db = 0.0;
  double delta_db = 0.0;  // always si_sdr_out_db - si_sdr_in_db
  double si_sdr_compressed_db = 0.0;
};

struct EvalResult {
  std::vector<MetricsRecord> records;
  std::vector<int> skipped_nodes;  // nodes with no associated source
};

// Scores one separated scene. For node k with an associated source (k below
// the source count) the reference is the reverberant image of source k at
// the node's first microphone; input SI-SDR uses the mixture at that mic,
// output SI-SDR the fused estimate. Nodes without a target are skipped and
// reported.
inline EvalResult evaluate_scene(const SeparationOutput& output,
                                 const SceneRecording& recording,
                                 const std::string& method = "oracle-irm") {
  if (output.nodes.size() != recording.mixture.size())
    throw EvalError("evaluate_scene: output has " +
                    std::to_string(output.nodes.size()) +
                    " nodes, recording has " +
                    std::to_string(recording.mixture.size()));
  EvalResult result;
  const int k_total = static_cast<int>(recording.mixture.size());
  for (int k = 0; k < k_total; ++k) {
    const int n_sources = static_cast<int>(recording.images[k][0].size());
    if (k >= n_sources) {
      result.skipped_nodes.push_back(k);
      continue;
    }
    const std::vector<double>& reference = recording.images[k][0][k];
    if (reference.empty())
      throw EvalError("evaluate_scene: missing reference image for node " +
                      std::to_string(k));
    MetricsRecord rec;
    rec.scene_id = output.scene_id;
    rec.node_id = k;
    rec.n_sources = n_sources;
    rec.n_nodes = k_total;
    rec.method = method;
    rec.si_sdr_in_db = si_sdr(recording.mixture[k][0], reference);
    const std::vector<double>& estimate = method == "mwf-local-only"
                                              ? output.nodes[k].compressed
                                              : output.nodes[k].estimate;
    rec.si_sdr_out_db = si_sdr(estimate, reference);
    rec.delta_db = rec.si_sdr_out_db - rec.si_sdr_in_db;
    rec.si_sdr_compressed_db = si_sdr(output.nodes[k].compressed, reference);
    result.records.push_back(rec);
  }
  return result;
}

struct SummaryRow {
  int n_sources = 0;
  int n_nodes = 0;
  std::string method;
  int count = 0;
  double mean_si_sdr_in_db = 0.0;
  double mean_si_sdr_out_db = 0.0;
  double mean_delta_db = 0.0;
  double ci_si_sdr_out_db = 0.0;  // 1.96 * sigma / sqrt(n)
  double ci_delta_db = 0.0;
};

struct Summary {
  std::vector<SummaryRow> rows;  // sorted by (n_sources, n_nodes, method)
};

namespace detail {

inline std::pair<double, double> mean_ci(const std::vector<double>& xs) {
  const int n = static_cast<int>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (n < 2) return {mean, 0.0};
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= (n - 1);  // sample variance
  return {mean, 1.96 * std::sqrt(var) / std::sqrt(static_cast<double>(n))};
}

}  // namespace detail

// Groups records by condition (N, K, method) and computes means with
// normal-approximation 95% confidence half-widths. Row order is fixed.
inline Summary aggregate(const std::vector<MetricsRecord>& records) {
  if (records.empty()) throw AggregationError("aggregate: no records");
  std::map<std::tuple<int, int, std::string>,
           std::vector<const MetricsRecord*>>
      groups;
  for (const auto& r : records)
    groups[{r.n_sources, r.n_nodes, r.method}].push_back(&r);

  Summary summary;
  for (const auto& [key, members] : groups) {
    SummaryRow row;
    row.n_sources = std::get<0>(key);
    row.n_nodes = std::get<1>(key);
    row.method = std::get<2>(key);
    row.count = static_cast<int>(members.size());
    std::vector<double> in_db, out_db, delta_db;
    for (const auto* r : members) {
      in_db.push_back(r->si_sdr_in_db);
      out_db.push_back(r->si_sdr_out_db);
      delta_db.push_back(r->delta_db);
    }
    row.mean_si_sdr_in_db = detail::mean_ci(in_db).first;
    std::tie(row.mean_si_sdr_out_db, row.ci_si_sdr_out_db) =
        detail::mean_ci(out_db);
    std::tie(row.mean_delta_db, row.ci_delta_db) = detail::mean_ci(delta_db);
    summary.rows.push_back(row);
  }
  return summary;
}

// --- CSV ------------------------------------------------------------------
// Doubles are printed with %.17g so a parse-and-reprint cycle is lossless.

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace detail

inline constexpr const char* kMetricsCsvHeader =
    "scene_id,node_id,n_sources,n_nodes,method,si_sdr_in_db,si_sdr_out_db,"
    "delta_db,si_sdr_compressed_db";

inline void write_metrics_csv(const std::string& path,
                              const std::vector<MetricsRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("write_metrics_csv: cannot open " + path);
  out << kMetricsCsvHeader << "\n";
  for (const auto& r : records) {
    out << r.scene_id << ',' << r.node_id << ',' << r.n_sources << ','
        << r.n_nodes << ',' << r.method << ','
        << detail::fmt_double(r.si_sdr_in_db) << ','
        << detail::fmt_double(r.si_sdr_out_db) << ','
        << detail::fmt_double(r.delta_db) << ','
        << detail::fmt_double(r.si_sdr_compressed_db) << "\n";
  }
}

inline std::vector<MetricsRecord> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_metrics_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsCsvHeader)
    throw FormatError("read_metrics_csv: bad header in " + path);
  std::vector<MetricsRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 9)
      throw FormatError("read_metrics_csv: malformed row in " + path);
    MetricsRecord r;
    r.scene_id = fields[0];
    r.node_id = std::stoi(fields[1]);
    r.n_sources = std::stoi(fields[2]);
    r.n_nodes = std::stoi(fields[3]);
    r.method = fields[4];
    r.si_sdr_in_db = std::stod(fields[5]);
    r.si_sdr_out_db = std::stod(fields[6]);
    r.delta_db = std::stod(fields[7]);
    r.si_sdr_compressed_db = std::stod(fields[8]);
    records.push_back(r);
  }
  return records;
}

inline void write_summary_csv(const std::string& path, const Summary& summary) {
  std::ofstream out(path);
  if (!out) throw IoError("write_summary_csv: cannot open " + path);
  out << "n_sources,n_nodes,method,count,mean_si_sdr_in_db,mean_si_sdr_out_db,"
         "mean_delta_db,ci_si_sdr_out_db,ci_delta_db\n";
  for (const auto& r : summary.rows) {
    out << r.n_sources << ',' << r.n_nodes << ',' << r.method << ','
        << r.count << ',' << detail::fmt_double(r.mean_si_sdr_in_db) << ','
        << detail::fmt_double(r.mean_si_sdr_out_db) << ','
        << detail::fmt_double(r.mean_delta_db) << ','
        << detail::fmt_double(r.ci_si_sdr_out_db) << ','
        << detail::fmt_double(r.ci_delta_db) << "\n";
  }
}

// Plot-ready table: one line per condition, x = condition label,
// y = mean output SI-SDR, err = CI half-width.
inline void write_plot_data(const std::string& path, const Summary& summary) {
  std::ofstream out(path);
  if (!out) throw IoError("write_plot_data: cannot open " + path);
  out << "condition,mean_si_sdr_out_db,ci_db\n";
  for (const auto& r : summary.rows) {
    out << 'N' << r.n_sources << "K" << r.n_nodes << '-' << r.method << ','
        << detail::fmt_double(r.mean_si_sdr_out_db) << ','
        << detail::fmt_double(r.ci_si_sdr_out_db) << "\n";
  }
}

}  // namespace distsep
