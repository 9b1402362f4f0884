// Copyright 2026 The distsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Batch experiment drivers behind the command-line surface: scene
// generation, rendering, separation, evaluation, and report emission.
// Every stage reads and writes only its declared directories, and all
// outputs except the timing diagnostics are bitwise reproducible.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "distsep/danse.hpp"
#include "distsep/errors.hpp"
#include "distsep/eval.hpp"
#include "distsep/rng.hpp"
#include "distsep/scene.hpp"
#include "distsep/synth.hpp"
#include "distsep/wav.hpp"

namespace distsep {

namespace fs = std::filesystem;

struct GridCell {
  int n_sources = 2;
  int n_nodes = 2;
  int scenes = 1;
};

struct ExperimentConfig {
  uint64_t seed = 1;
  std::string out_dir = "out";
  std::string corpus_dir;  // empty: synthetic speech-like sources
  double duration_s = 10.0;
  std::vector<GridCell> grid;
  std::string method = "oracle-irm";  // oracle-irm | file-masks | mwf-local-only
  std::string masks_dir;              // for file-masks
  int mics_per_node = 4;
  int jobs = 1;
  SeparationConfig separation;

  void validate() const {
    if (grid.empty()) throw ConfigError("experiment: empty (N, K) grid");
    for (const auto& cell : grid)
      if (cell.n_sources < 1 || cell.n_nodes < 1 || cell.scenes < 1)
        throw ConfigError("experiment: grid cells need n, k, scenes >= 1");
    if (method != "oracle-irm" && method != "file-masks" &&
        method != "mwf-local-only")
      throw ConfigError("experiment: unknown method '" + method + "'");
    if (method == "file-masks" && masks_dir.empty())
      throw ConfigError("experiment: method file-masks requires masks_dir");
    if (duration_s <= 0) throw ConfigError("experiment: duration must be > 0");
    if (mics_per_node < 1) throw ConfigError("experiment: mics_per_node >= 1");
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["corpus_dir"] = corpus_dir;
    j["duration_s"] = duration_s;
    j["method"] = method;
    j["masks_dir"] = masks_dir;
    j["mics_per_node"] = mics_per_node;
    j["jobs"] = jobs;
    j["grid"] = nlohmann::json::array();
    for (const auto& cell : grid)
      j["grid"].push_back({{"n_sources", cell.n_sources},
                           {"n_nodes", cell.n_nodes},
                           {"scenes", cell.scenes}});
    j["separation"] = {
        {"loading", separation.loading},
        {"residual_tol", separation.residual_tol},
        {"silence_threshold_db", separation.silence_threshold_db},
        {"exclude_silent", separation.exclude_silent},
        {"epsilon", separation.provider_step1.epsilon},
        {"stft",
         {{"sample_rate_hz", separation.stft.sample_rate_hz},
          {"window_len", separation.stft.window_len},
          {"hop", separation.stft.hop},
          {"window", separation.stft.window}}}};
    return j;
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.corpus_dir = j.value("corpus_dir", cfg.corpus_dir);
    cfg.duration_s = j.value("duration_s", cfg.duration_s);
    cfg.method = j.value("method", cfg.method);
    cfg.masks_dir = j.value("masks_dir", cfg.masks_dir);
    cfg.mics_per_node = j.value("mics_per_node", cfg.mics_per_node);
    cfg.jobs = j.value("jobs", cfg.jobs);
    if (j.contains("grid"))
      for (const auto& jc : j["grid"]) {
        GridCell cell;
        cell.n_sources = jc.value("n_sources", 2);
        cell.n_nodes = jc.value("n_nodes", 2);
        cell.scenes = jc.value("scenes", 1);
        cfg.grid.push_back(cell);
      }
    if (j.contains("separation")) {
      const auto& js = j["separation"];
      cfg.separation.loading = js.value("loading", cfg.separation.loading);
      cfg.separation.residual_tol =
          js.value("residual_tol", cfg.separation.residual_tol);
      cfg.separation.silence_threshold_db =
          js.value("silence_threshold_db", cfg.separation.silence_threshold_db);
      cfg.separation.exclude_silent =
          js.value("exclude_silent", cfg.separation.exclude_silent);
      const double eps = js.value("epsilon", 1e-12);
      cfg.separation.provider_step1.epsilon = eps;
      cfg.separation.provider_step2.epsilon = eps;
      if (js.contains("stft")) {
        const auto& jt = js["stft"];
        cfg.separation.stft.sample_rate_hz =
            jt.value("sample_rate_hz", cfg.separation.stft.sample_rate_hz);
        cfg.separation.stft.window_len =
            jt.value("window_len", cfg.separation.stft.window_len);
        cfg.separation.stft.hop = jt.value("hop", cfg.separation.stft.hop);
        cfg.separation.stft.window =
            jt.value("window", cfg.separation.stft.window);
      }
    }
    return cfg;
  }
};

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config: " + path + ": " + e.what());
  }
  ExperimentConfig cfg = ExperimentConfig::from_json(j);
  cfg.validate();
  return cfg;
}

namespace detail {

inline std::string fnv1a_hex(const std::string& data) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

// Runs fn(0..count-1) on a worker pool. Work items own disjoint outputs, so
// the schedule cannot influence any produced byte; failures are re-thrown in
// index order for deterministic error reporting.
inline void parallel_for(int jobs, int count,
                         const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::vector<fs::path> sorted_files(const std::string& dir,
                                          const std::string& extension) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == extension)
      out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string scene_stem(int n_sources, int n_nodes, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "scene_n%d_k%d_%04d", n_sources, n_nodes,
                index);
  return buf;
}

// Deterministic per-scene dry sources: either synthetic speech-like noise
// or corpus WAVs looped/trimmed to the requested duration. Corpus files are
// picked by a seed-derived offset into the sorted listing, consecutive files
// per source so one scene never reuses a file (when the corpus is large
// enough).
inline std::vector<std::vector<double>> make_dry_sources(
    const SceneSpec& scene, const std::string& corpus_dir, double duration_s) {
  const std::size_t n_samples = static_cast<std::size_t>(
      duration_s * scene.sample_rate_hz + 0.5);
  std::vector<std::vector<double>> dry;
  if (corpus_dir.empty()) {
    for (int n = 0; n < scene.n_sources(); ++n)
      dry.push_back(make_speech_like(
          splitmix64(scene.seed ^ (0x517eced5ULL + n)), n_samples,
          scene.sample_rate_hz));
    return dry;
  }
  const auto files = sorted_files(corpus_dir, ".wav");
  if (static_cast<int>(files.size()) < scene.n_sources())
    throw ConfigError("corpus " + corpus_dir + " has " +
                      std::to_string(files.size()) + " WAVs, scene needs " +
                      std::to_string(scene.n_sources()));
  const std::size_t start = splitmix64(scene.seed) % files.size();
  for (int n = 0; n < scene.n_sources(); ++n) {
    const fs::path& path = files[(start + n) % files.size()];
    AudioBuffer buf = read_wav(path.string());
    if (buf.sample_rate_hz != scene.sample_rate_hz)
      throw FormatError("corpus file " + path.string() + " is " +
                        std::to_string(buf.sample_rate_hz) +
                        " Hz, scene expects " +
                        std::to_string(scene.sample_rate_hz));
    const std::vector<double>& src = buf.channels.at(0);
    if (src.empty()) throw FormatError("corpus file " + path.string() + " is empty");
    std::vector<double> looped(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) looped[i] = src[i % src.size()];
    dry.push_back(std::move(looped));
  }
  return dry;
}

inline SeparationConfig resolve_separation(const SeparationConfig& base,
                                           const std::string& method,
                                           const std::string& masks_dir) {
  SeparationConfig cfg = base;
  if (method == "oracle-irm" || method == "mwf-local-only") {
    cfg.provider_step1.kind = "oracle-irm";
    cfg.provider_step2.kind = "oracle-irm";
    cfg.provider_step1.file_dir.clear();
    cfg.provider_step2.file_dir.clear();
  } else if (method == "file-masks") {
    if (masks_dir.empty())
      throw ConfigError("method file-masks requires --masks-dir");
    cfg.provider_step1.kind = "file";
    cfg.provider_step2.kind = "file";
    cfg.provider_step1.file_dir = masks_dir;
    cfg.provider_step2.file_dir = masks_dir;
  } else {
    throw ConfigError("unknown method '" + method + "'");
  }
  return cfg;
}

inline std::string separation_hash(const SeparationConfig& cfg,
                                   const std::string& method) {
  nlohmann::json j = {{"method", method},
                      {"loading", cfg.loading},
                      {"residual_tol", cfg.residual_tol},
                      {"silence_threshold_db", cfg.silence_threshold_db},
                      {"exclude_silent", cfg.exclude_silent},
                      {"epsilon", cfg.provider_step1.epsilon},
                      {"kind1", cfg.provider_step1.kind},
                      {"kind2", cfg.provider_step2.kind},
                      {"stft",
                       {{"sample_rate_hz", cfg.stft.sample_rate_hz},
                        {"window_len", cfg.stft.window_len},
                        {"hop", cfg.stft.hop},
                        {"window", cfg.stft.window}}}};
    return fnv1a_hex(j.dump());
}

}  // namespace detail

// --- Stage drivers --------------------------------------------------------

inline std::vector<std::string> cmd_gen_scenes(uint64_t seed_base, int n_sources,
                                               int n_nodes, int count,
                                               int mics_per_node,
                                               const std::string& out_dir) {
  fs::create_directories(out_dir);
  SceneSampleParams params;
  params.mics_per_node = mics_per_node;
  std::vector<std::string> stems;
  for (int i = 0; i < count; ++i) {
    const uint64_t seed = mix_seed(seed_base, n_sources, n_nodes, i);
    const SceneSpec scene = sample_scene(seed, n_sources, n_nodes, params);
    const std::string stem = detail::scene_stem(n_sources, n_nodes, i);
    save_scene(out_dir + "/" + stem + ".json", scene);
    stems.push_back(stem);
  }
  return stems;
}

inline void cmd_render(const std::string& scenes_dir,
                       const std::string& out_dir,
                       const std::string& corpus_dir, double duration_s,
                       int jobs) {
  const auto scene_files = detail::sorted_files(scenes_dir, ".json");
  if (scene_files.empty())
    throw IoError("render: no scene files in " + scenes_dir);
  fs::create_directories(out_dir);
  detail::parallel_for(jobs, static_cast<int>(scene_files.size()), [&](int i) {
    const SceneSpec scene = load_scene(scene_files[i].string());
    const std::string stem = scene_files[i].stem().string();
    const std::string dir = out_dir + "/" + stem;
    fs::create_directories(dir);
    const RirSet rirs = compute_rirs(scene);
    const auto dry = detail::make_dry_sources(scene, corpus_dir, duration_s);
    const SceneRecording rec = render_scene(scene, rirs, dry);
    save_rirs(dir + "/rirs.wav", rirs);
    save_recording(dir, rec);
  });
}

inline void cmd_separate(const std::string& scenes_dir,
                         const std::string& renders_dir,
                         const std::string& out_dir, const std::string& method,
                         const std::string& masks_dir,
                         const SeparationConfig& base_config, int jobs) {
  const auto scene_files = detail::sorted_files(scenes_dir, ".json");
  if (scene_files.empty())
    throw IoError("separate: no scene files in " + scenes_dir);
  const SeparationConfig sep =
      detail::resolve_separation(base_config, method, masks_dir);
  const std::string config_hash = detail::separation_hash(sep, method);
  fs::create_directories(out_dir);
  detail::parallel_for(jobs, static_cast<int>(scene_files.size()), [&](int i) {
    const SceneSpec scene = load_scene(scene_files[i].string());
    const std::string stem = scene_files[i].stem().string();
    const SceneRecording rec = load_recording(renders_dir + "/" + stem, scene);
    SeparationOutput output = run_separation(rec, sep);
    output.scene_id = stem;

    const std::string dir = out_dir + "/" + stem;
    fs::create_directories(dir);
    for (const auto& node : output.nodes) {
      AudioBuffer est;
      est.sample_rate_hz = rec.sample_rate_hz;
      est.channels.push_back(node.estimate);
      write_wav(dir + "/estimate_node" + std::to_string(node.node_id) + ".wav",
                est);
      AudioBuffer comp;
      comp.sample_rate_hz = rec.sample_rate_hz;
      comp.channels.push_back(node.compressed);
      write_wav(dir + "/compressed_node" + std::to_string(node.node_id) +
                    ".wav",
                comp);
    }
    nlohmann::json manifest;
    manifest["schema_version"] = 1;
    manifest["scene_id"] = stem;
    manifest["scene_seed"] = scene.seed;
    manifest["n_sources"] = scene.n_sources();
    manifest["n_nodes"] = scene.n_nodes();
    manifest["method"] = method;
    manifest["config_hash"] = config_hash;
    manifest["silence_report"] = output.silence_report();
    std::ofstream mf(dir + "/run_manifest.json");
    if (!mf) throw IoError("separate: cannot write manifest in " + dir);
    mf << manifest.dump(2) << "\n";

    // Wall-clock diagnostics; the one output that is not reproducible
    // byte-for-byte across runs, hence kept out of the manifest.
    nlohmann::json timings(output.timings_ms);
    std::ofstream tf(dir + "/timings.json");
    if (!tf) throw IoError("separate: cannot write timings in " + dir);
    tf << timings.dump(2) << "\n";
  });
}

inline std::vector<MetricsRecord> cmd_eval(const std::string& scenes_dir,
                                           const std::string& renders_dir,
                                           const std::string& separated_dir,
                                           const std::string& metrics_path) {
  const auto scene_files = detail::sorted_files(scenes_dir, ".json");
  if (scene_files.empty()) throw IoError("eval: no scene files in " + scenes_dir);
  std::vector<MetricsRecord> all_records;
  for (const auto& scene_file : scene_files) {
    const SceneSpec scene = load_scene(scene_file.string());
    const std::string stem = scene_file.stem().string();
    const SceneRecording rec = load_recording(renders_dir + "/" + stem, scene);
    const std::string dir = separated_dir + "/" + stem;

    std::ifstream mf(dir + "/run_manifest.json");
    if (!mf) throw IoError("eval: missing manifest " + dir + "/run_manifest.json");
    nlohmann::json manifest;
    try {
      mf >> manifest;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("eval: bad manifest in " + dir + ": " + e.what());
    }
    const std::string method = manifest.value("method", "oracle-irm");

    SeparationOutput output;
    output.scene_id = stem;
    for (int k = 0; k < scene.n_nodes(); ++k) {
      NodeResult node;
      node.node_id = k;
      node.estimate =
          read_wav(dir + "/estimate_node" + std::to_string(k) + ".wav")
              .channels.at(0);
      node.compressed =
          read_wav(dir + "/compressed_node" + std::to_string(k) + ".wav")
              .channels.at(0);
      output.nodes.push_back(std::move(node));
    }
    const EvalResult result = evaluate_scene(output, rec, method);
    all_records.insert(all_records.end(), result.records.begin(),
                       result.records.end());
  }
  write_metrics_csv(metrics_path, all_records);
  return all_records;
}

inline Summary cmd_report(const std::string& metrics_path,
                          const std::string& out_dir) {
  const auto records = read_metrics_csv(metrics_path);
  const Summary summary = aggregate(records);
  fs::create_directories(out_dir);
  write_summary_csv(out_dir + "/summary.csv", summary);
  write_plot_data(out_dir + "/plot_data.csv", summary);
  return summary;
}

// Full pipeline under config.out_dir: scenes/, renders/, separated/,
// metrics.csv, summary.csv, plot_data.csv.
inline Summary run_all(const ExperimentConfig& config) {
  config.validate();
  const std::string scenes = config.out_dir + "/scenes";
  const std::string renders = config.out_dir + "/renders";
  const std::string separated = config.out_dir + "/separated";
  fs::create_directories(scenes);
  for (const auto& cell : config.grid) {
    cmd_gen_scenes(config.seed, cell.n_sources, cell.n_nodes, cell.scenes,
                   config.mics_per_node, scenes);
  }
  cmd_render(scenes, renders, config.corpus_dir, config.duration_s,
             config.jobs);
  cmd_separate(scenes, renders, separated, config.method, config.masks_dir,
               config.separation, config.jobs);
  cmd_eval(scenes, renders, separated, config.out_dir + "/metrics.csv");
  return cmd_report(config.out_dir + "/metrics.csv", config.out_dir);
}

}  // namespace distsep
