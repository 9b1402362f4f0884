// Copyright 2026 The distsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Meeting-scene simulation: randomized room/table/source/node geometry,
// image-source room impulse responses, and multichannel rendering.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "distsep/errors.hpp"
#include "distsep/fft.hpp"
#include "distsep/rng.hpp"
#include "distsep/wav.hpp"

namespace distsep {

inline constexpr double kSpeedOfSound = 343.0;  // m/s, dry air default

struct RoomSpec {
  double length_m = 0.0;
  double width_m = 0.0;
  double height_m = 0.0;
  double t60_s = 0.0;

  double volume() const { return length_m * width_m * height_m; }
  double surface() const {
    return 2.0 * (length_m * width_m + length_m * height_m +
                  width_m * height_m);
  }
};

struct TableSpec {
  std::array<double, 2> center_xy = {0.0, 0.0};
  double radius_m = 0.0;
  double height_m = 0.0;
};

struct SourcePlacement {
  int source_id = 0;  // zero-based
  std::array<double, 3> position_xyz = {0.0, 0.0, 0.0};
  double azimuth_rad = 0.0;
};

struct NodePlacement {
  int node_id = 0;  // zero-based
  std::vector<std::array<double, 3>> mic_positions_xyz;
  std::optional<int> associated_source;  // absent for over-determined nodes
};

struct SceneSpec {
  RoomSpec room;
  TableSpec table;
  std::vector<SourcePlacement> sources;
  std::vector<NodePlacement> nodes;
  int sample_rate_hz = 16000;
  uint64_t seed = 0;

  int n_sources() const { return static_cast<int>(sources.size()); }
  int n_nodes() const { return static_cast<int>(nodes.size()); }
};

// RIRs indexed [node][mic][source], each a causal FIR starting at t = 0.
struct RirSet {
  std::vector<std::vector<std::vector<std::vector<double>>>> rirs;
  int sample_rate_hz = 16000;
};

struct SceneRecording {
  // mixture[node][mic], images[node][mic][source], dry_sources[source]
  // (after equal-power leveling). All waveforms share one length.
  std::vector<std::vector<std::vector<double>>> mixture;
  std::vector<std::vector<std::vector<std::vector<double>>>> images;
  std::vector<std::vector<double>> dry_sources;
  int sample_rate_hz = 16000;
};

struct SceneSampleParams {
  int mics_per_node = 4;
  double mic_square_side_m = 0.05;
  double node_edge_inset_m = 0.05;
  double source_max_edge_dist_m = 0.5;
  double wall_margin_m = 0.05;
  int max_retries = 100;
  int sample_rate_hz = 16000;
};

namespace detail {

inline double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  return a < 0.0 ? a + two_pi : a;
}

// Microphone layout around a node center at table height. Four mics form an
// axis-aligned square (corner order: -x-y, +x-y, -x+y, +x+y); one mic sits
// at the center; other counts are spread on a circle of the same footprint.
inline std::vector<std::array<double, 3>> mic_layout(
    const std::array<double, 3>& center, int mics, double side) {
  std::vector<std::array<double, 3>> out;
  if (mics == 1) {
    out.push_back(center);
    return out;
  }
  if (mics == 4) {
    const double h = side / 2.0;
    out.push_back({center[0] - h, center[1] - h, center[2]});
    out.push_back({center[0] + h, center[1] - h, center[2]});
    out.push_back({center[0] - h, center[1] + h, center[2]});
    out.push_back({center[0] + h, center[1] + h, center[2]});
    return out;
  }
  for (int i = 0; i < mics; ++i) {
    const double a = 2.0 * std::numbers::pi * i / mics;
    out.push_back({center[0] + side / 2.0 * std::cos(a),
                   center[1] + side / 2.0 * std::sin(a), center[2]});
  }
  return out;
}

}  // namespace detail

// Draws one meeting scene. Draw order is frozen (part of the on-disk
// determinism contract): room dims, t60, table radius (with retries), table
// center, table height, base azimuth, then per-source edge distance and
// height. Node positions are derived from the draws, not drawn.
inline SceneSpec sample_scene(uint64_t seed, int n_sources, int n_nodes,
                              const SceneSampleParams& params = {}) {
  if (n_sources < 1) throw ConfigError("sample_scene: n_sources must be >= 1");
  if (n_nodes < 1) throw ConfigError("sample_scene: n_nodes must be >= 1");
  if (params.mics_per_node < 1)
    throw ConfigError("sample_scene: mics_per_node must be >= 1");

  Rng rng(seed);
  SceneSpec scene;
  scene.seed = seed;
  scene.sample_rate_hz = params.sample_rate_hz;
  scene.room.length_m = rng.uniform(3.0, 9.0);
  scene.room.width_m = rng.uniform(3.0, 7.0);
  scene.room.height_m = rng.uniform(2.5, 3.0);
  scene.room.t60_s = rng.uniform(0.3, 0.6);

  // The table plus the widest source ring plus the wall margin must fit the
  // footprint; retry the radius draw until it does.
  const double clearance = params.source_max_edge_dist_m + params.wall_margin_m;
  double radius = 0.0;
  bool placed = false;
  for (int attempt = 0; attempt < params.max_retries; ++attempt) {
    radius = rng.uniform(0.3, 2.5);
    const double ring = radius + clearance;
    if (2.0 * ring <= scene.room.length_m && 2.0 * ring <= scene.room.width_m) {
      placed = true;
      break;
    }
  }
  if (!placed)
    throw SamplingError(
        "sample_scene: table with source ring does not fit the room footprint "
        "after " + std::to_string(params.max_retries) + " radius draws");

  const double ring = radius + clearance;
  scene.table.radius_m = radius;
  scene.table.center_xy[0] = rng.uniform(ring, scene.room.length_m - ring);
  scene.table.center_xy[1] = rng.uniform(ring, scene.room.width_m - ring);
  scene.table.height_m = rng.uniform(0.8, 0.9);

  const double theta0 = rng.uniform(0.0, 2.0 * std::numbers::pi);
  for (int n = 0; n < n_sources; ++n) {
    const double edge_dist = rng.uniform(0.0, params.source_max_edge_dist_m);
    const double height = rng.uniform(1.15, 1.80);
    SourcePlacement src;
    src.source_id = n;
    src.azimuth_rad =
        detail::wrap_angle(theta0 + 2.0 * std::numbers::pi * n / n_sources);
    const double r = radius + edge_dist;
    src.position_xyz = {scene.table.center_xy[0] + r * std::cos(src.azimuth_rad),
                        scene.table.center_xy[1] + r * std::sin(src.azimuth_rad),
                        height};
    scene.sources.push_back(src);
  }

  // Node azimuths: node k sits in front of source k; extra nodes are placed
  // one by one at the midpoint of the currently largest free angular gap
  // (ties broken toward the gap starting at the smallest azimuth).
  std::vector<double> node_azimuths;
  for (int k = 0; k < n_nodes; ++k) {
    if (k < n_sources) {
      node_azimuths.push_back(scene.sources[k].azimuth_rad);
      continue;
    }
    std::vector<double> sorted = node_azimuths;
    std::sort(sorted.begin(), sorted.end());
    double best_gap = -1.0;
    double best_mid = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const double a = sorted[i];
      const double b = i + 1 < sorted.size()
                           ? sorted[i + 1]
                           : sorted[0] + 2.0 * std::numbers::pi;
      const double gap = b - a;
      if (gap > best_gap + 1e-12) {
        best_gap = gap;
        best_mid = detail::wrap_angle(a + gap / 2.0);
      }
    }
    node_azimuths.push_back(best_mid);
  }

  const double node_radius =
      std::max(0.0, radius - params.node_edge_inset_m);
  for (int k = 0; k < n_nodes; ++k) {
    NodePlacement node;
    node.node_id = k;
    if (k < n_sources) node.associated_source = k;
    const double a = node_azimuths[k];
    const std::array<double, 3> center = {
        scene.table.center_xy[0] + node_radius * std::cos(a),
        scene.table.center_xy[1] + node_radius * std::sin(a),
        scene.table.height_m};
    node.mic_positions_xyz = detail::mic_layout(center, params.mics_per_node,
                                                params.mic_square_side_m);
    scene.nodes.push_back(node);
  }
  return scene;
}

inline void validate_scene(const SceneSpec& scene) {
  const RoomSpec& r = scene.room;
  if (r.length_m <= 0 || r.width_m <= 0 || r.height_m <= 0 || r.t60_s <= 0)
    throw ValidationError("scene: room dimensions and t60 must be positive");
  if (scene.sources.empty()) throw ValidationError("scene: no sources");
  if (scene.nodes.empty()) throw ValidationError("scene: no nodes");
  if (scene.sample_rate_hz <= 0)
    throw ValidationError("scene: sample rate must be positive");
  auto inside = [&](const std::array<double, 3>& p) {
    return p[0] > 0 && p[0] < r.length_m && p[1] > 0 && p[1] < r.width_m &&
           p[2] > 0 && p[2] < r.height_m;
  };
  for (const auto& s : scene.sources)
    if (!inside(s.position_xyz))
      throw ValidationError("scene: source " + std::to_string(s.source_id) +
                            " outside the room");
  for (const auto& n : scene.nodes) {
    if (n.mic_positions_xyz.empty())
      throw ValidationError("scene: node " + std::to_string(n.node_id) +
                            " has no microphones");
    for (const auto& m : n.mic_positions_xyz)
      if (!inside(m))
        throw ValidationError("scene: node " + std::to_string(n.node_id) +
                              " microphone outside the room");
    if (n.associated_source &&
        (*n.associated_source < 0 ||
         *n.associated_source >= scene.n_sources()))
      throw ValidationError("scene: node " + std::to_string(n.node_id) +
                            " references a missing source");
  }
}

// Sabine inversion: alpha = 0.161 V / (S t60), uniform over all surfaces.
inline double t60_to_absorption(double t60_s, const RoomSpec& room) {
  if (t60_s <= 0.0) throw ConfigError("t60_to_absorption: t60 must be > 0");
  const double alpha = 0.161 * room.volume() / (room.surface() * t60_s);
  if (alpha >= 1.0)
    throw AcousticsError(
        "t60_to_absorption: Sabine absorption " + std::to_string(alpha) +
        " >= 1; the room is too small for t60 = " + std::to_string(t60_s) +
        " s");
  return alpha;
}

struct RirParams {
  double length_factor = 1.2;   // RIR length = ceil(length_factor * t60 * fs)
  int sinc_half_width = 40;     // 81-tap Hann-windowed sinc interpolation
  double speed_of_sound = kSpeedOfSound;
  std::optional<double> absorption_override;  // bypass Sabine (testing)
};

namespace detail {

// Adds one image contribution: an 81-tap Hann-windowed sinc centered at the
// fractional delay. Exploits sin(pi(j - mu)) = -(-1)^j sin(pi mu) and the
// cosine addition theorem so only three trig evaluations happen per image;
// the j-dependent factors come from tables precomputed per half-width.
class SincTables {
 public:
  explicit SincTables(int hw) : hw_(hw), cos_t_(2 * hw + 1), sin_t_(2 * hw + 1) {
    for (int j = -hw; j <= hw; ++j) {
      cos_t_[j + hw] = std::cos(std::numbers::pi * j / hw);
      sin_t_[j + hw] = std::sin(std::numbers::pi * j / hw);
    }
  }

  void add_image(std::vector<double>& rir, double delay_samples,
                 double amplitude) const {
    const int n_base = static_cast<int>(std::floor(delay_samples));
    const double mu = delay_samples - n_base;
    const int len = static_cast<int>(rir.size());

    const double sin_pi_mu = std::sin(std::numbers::pi * mu);
    const double cos_h = std::cos(std::numbers::pi * mu / hw_);
    const double sin_h = std::sin(std::numbers::pi * mu / hw_);

    // Support is |j - mu| <= hw; for mu > 0 that excludes j = -hw.
    int j_lo = mu > 0.0 ? -hw_ + 1 : -hw_;
    if (n_base + j_lo < 0) j_lo = -n_base;
    int j_hi = hw_;
    if (n_base + j_hi >= len) j_hi = len - 1 - n_base;
    if (j_lo > j_hi) return;

    double sign = (j_lo % 2 == 0) ? 1.0 : -1.0;
    for (int j = j_lo; j <= j_hi; ++j, sign = -sign) {
      const double x = j - mu;
      double val;
      if (std::abs(x) < 1e-12) {
        val = 1.0;
      } else {
        const double sinc = -sign * sin_pi_mu / (std::numbers::pi * x);
        const double hann =
            0.5 * (1.0 + cos_t_[j + hw_] * cos_h + sin_t_[j + hw_] * sin_h);
        val = sinc * hann;
      }
      rir[n_base + j] += amplitude * val;
    }
  }

 private:
  int hw_;
  std::vector<double> cos_t_;  // cos(pi j / hw)
  std::vector<double> sin_t_;  // sin(pi j / hw)
};

}  // namespace detail

// Shoebox image-source synthesis with uniform wall absorption. Per axis the
// image coordinate is (1-2q) s + 2 m L with q in {0,1}, m integer, and the
// per-axis reflection count is |2m - q|; a tap of amplitude
// (1-alpha)^(reflections/2) / (4 pi d) lands at delay d/c via windowed-sinc
// interpolation. Images beyond the RIR tail (plus interpolation margin) are
// skipped.
inline std::vector<double> compute_rir_single(
    const std::array<double, 3>& source, const std::array<double, 3>& mic,
    const RoomSpec& room, double alpha, int sample_rate_hz,
    const RirParams& params, const detail::SincTables& tables) {
  const double fs = sample_rate_hz;
  const int rir_len =
      static_cast<int>(std::ceil(params.length_factor * room.t60_s * fs));
  std::vector<double> rir(rir_len, 0.0);

  const double c = params.speed_of_sound;
  const double max_dist = (rir_len + params.sinc_half_width + 1) / fs * c;
  const double refl_amp = std::sqrt(1.0 - alpha);
  const std::array<double, 3> dims = {room.length_m, room.width_m,
                                      room.height_m};

  // Per-axis candidate image coordinates and reflection counts.
  std::array<std::vector<std::pair<double, int>>, 3> axis;
  int max_refl = 0;
  for (int d = 0; d < 3; ++d) {
    const double L = dims[d];
    int axis_max = 0;
    for (int q = 0; q <= 1; ++q) {
      const double base = (1 - 2 * q) * source[d];
      const int m_lo = static_cast<int>(
          std::ceil((mic[d] - max_dist - base) / (2.0 * L)));
      const int m_hi = static_cast<int>(
          std::floor((mic[d] + max_dist - base) / (2.0 * L)));
      for (int m = m_lo; m <= m_hi; ++m) {
        const int refl = std::abs(2 * m - q);
        axis[d].push_back({base + 2.0 * m * L - mic[d], refl});
        axis_max = std::max(axis_max, refl);
      }
    }
    max_refl += axis_max;
  }
  std::vector<double> refl_pow(max_refl + 1, 1.0);
  for (int i = 1; i <= max_refl; ++i) refl_pow[i] = refl_pow[i - 1] * refl_amp;

  const double max_dist_sq = max_dist * max_dist;
  for (const auto& [dx, rx] : axis[0]) {
    const double dx2 = dx * dx;
    if (dx2 > max_dist_sq) continue;
    for (const auto& [dy, ry] : axis[1]) {
      const double dxy2 = dx2 + dy * dy;
      if (dxy2 > max_dist_sq) continue;
      const int rxy = rx + ry;
      for (const auto& [dz, rz] : axis[2]) {
        const double dist_sq = dxy2 + dz * dz;
        if (dist_sq > max_dist_sq) continue;
        const double dist = std::sqrt(dist_sq);
        const double amp = refl_pow[rxy + rz] /
                           (4.0 * std::numbers::pi * std::max(dist, 1e-3));
        tables.add_image(rir, dist / c * fs, amp);
      }
    }
  }
  return rir;
}

inline RirSet compute_rirs(const SceneSpec& scene, const RirParams& params = {}) {
  validate_scene(scene);
  const double alpha = params.absorption_override
                           ? *params.absorption_override
                           : t60_to_absorption(scene.room.t60_s, scene.room);
  if (alpha <= 0.0 || alpha > 1.0)
    throw AcousticsError("compute_rirs: absorption outside (0, 1]");

  const detail::SincTables tables(params.sinc_half_width);
  RirSet set;
  set.sample_rate_hz = scene.sample_rate_hz;
  set.rirs.resize(scene.n_nodes());
  for (int k = 0; k < scene.n_nodes(); ++k) {
    const auto& mics = scene.nodes[k].mic_positions_xyz;
    set.rirs[k].resize(mics.size());
    for (std::size_t m = 0; m < mics.size(); ++m) {
      set.rirs[k][m].resize(scene.n_sources());
      for (int n = 0; n < scene.n_sources(); ++n) {
        set.rirs[k][m][n] = compute_rir_single(
            scene.sources[n].position_xyz, mics[m], scene.room, alpha,
            scene.sample_rate_hz, params, tables);
      }
    }
  }
  return set;
}

// Levels every dry source to unit average power, convolves with the RIRs,
// and sums the per-source images into the mixture. All signals are trimmed
// to the shortest dry source so the talkers fully overlap.
inline SceneRecording render_scene(const SceneSpec& scene, const RirSet& rirs,
                                   const std::vector<std::vector<double>>& dry,
                                   int dry_sample_rate_hz = 0) {
  if (static_cast<int>(dry.size()) != scene.n_sources())
    throw ConfigError("render_scene: got " + std::to_string(dry.size()) +
                      " dry sources, scene has " +
                      std::to_string(scene.n_sources()));
  if (dry_sample_rate_hz != 0 && dry_sample_rate_hz != scene.sample_rate_hz)
    throw FormatError("render_scene: dry sources at " +
                      std::to_string(dry_sample_rate_hz) +
                      " Hz, scene expects " +
                      std::to_string(scene.sample_rate_hz) + " Hz");
  if (rirs.sample_rate_hz != scene.sample_rate_hz)
    throw FormatError("render_scene: RIR sample rate mismatch");

  std::size_t length = dry[0].size();
  for (const auto& s : dry) length = std::min(length, s.size());
  if (length == 0) throw ConfigError("render_scene: empty dry source");

  SceneRecording rec;
  rec.sample_rate_hz = scene.sample_rate_hz;
  rec.dry_sources.resize(dry.size());
  for (std::size_t n = 0; n < dry.size(); ++n) {
    double power = 0.0;
    for (std::size_t i = 0; i < length; ++i) power += dry[n][i] * dry[n][i];
    power /= length;
    if (power <= 0.0)
      throw ConfigError("render_scene: dry source " + std::to_string(n) +
                        " has zero power");
    const double gain = 1.0 / std::sqrt(power);
    rec.dry_sources[n].resize(length);
    for (std::size_t i = 0; i < length; ++i)
      rec.dry_sources[n][i] = gain * dry[n][i];
  }

  rec.images.resize(scene.n_nodes());
  rec.mixture.resize(scene.n_nodes());
  for (int k = 0; k < scene.n_nodes(); ++k) {
    const std::size_t mics = scene.nodes[k].mic_positions_xyz.size();
    rec.images[k].resize(mics);
    rec.mixture[k].resize(mics);
    for (std::size_t m = 0; m < mics; ++m) {
      rec.images[k][m].resize(scene.n_sources());
      std::vector<double> mix(length, 0.0);
      for (int n = 0; n < scene.n_sources(); ++n) {
        rec.images[k][m][n] =
            fft_convolve(rec.dry_sources[n], rirs.rirs[k][m][n], length);
        for (std::size_t i = 0; i < length; ++i)
          mix[i] += rec.images[k][m][n][i];
      }
      rec.mixture[k][m] = std::move(mix);
    }
  }
  return rec;
}

// --- Serialization -------------------------------------------------------
// SceneSpec travels as schema-versioned JSON; RirSet and SceneRecording as
// 32-bit float multichannel WAV plus a JSON sidecar mapping channels to
// (node, mic, source).

inline nlohmann::json scene_to_json(const SceneSpec& scene) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["seed"] = scene.seed;
  j["sample_rate_hz"] = scene.sample_rate_hz;
  j["room"] = {{"length_m", scene.room.length_m},
               {"width_m", scene.room.width_m},
               {"height_m", scene.room.height_m},
               {"t60_s", scene.room.t60_s}};
  j["table"] = {{"center_xy", scene.table.center_xy},
                {"radius_m", scene.table.radius_m},
                {"height_m", scene.table.height_m}};
  j["sources"] = nlohmann::json::array();
  for (const auto& s : scene.sources) {
    j["sources"].push_back({{"source_id", s.source_id},
                            {"position_xyz", s.position_xyz},
                            {"azimuth_rad", s.azimuth_rad}});
  }
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : scene.nodes) {
    nlohmann::json jn;
    jn["node_id"] = n.node_id;
    jn["mic_positions_xyz"] = n.mic_positions_xyz;
    if (n.associated_source)
      jn["associated_source"] = *n.associated_source;
    else
      jn["associated_source"] = nullptr;
    j["nodes"].push_back(jn);
  }
  return j;
}

inline SceneSpec scene_from_json(const nlohmann::json& j) {
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
    throw FormatError("scene: unsupported or missing schema_version");
  SceneSpec scene;
  scene.seed = j.at("seed").get<uint64_t>();
  scene.sample_rate_hz = j.at("sample_rate_hz").get<int>();
  const auto& jr = j.at("room");
  scene.room = {jr.at("length_m").get<double>(), jr.at("width_m").get<double>(),
                jr.at("height_m").get<double>(), jr.at("t60_s").get<double>()};
  const auto& jt = j.at("table");
  scene.table.center_xy = jt.at("center_xy").get<std::array<double, 2>>();
  scene.table.radius_m = jt.at("radius_m").get<double>();
  scene.table.height_m = jt.at("height_m").get<double>();
  for (const auto& js : j.at("sources")) {
    SourcePlacement s;
    s.source_id = js.at("source_id").get<int>();
    s.position_xyz = js.at("position_xyz").get<std::array<double, 3>>();
    s.azimuth_rad = js.at("azimuth_rad").get<double>();
    scene.sources.push_back(s);
  }
  for (const auto& jn : j.at("nodes")) {
    NodePlacement n;
    n.node_id = jn.at("node_id").get<int>();
    n.mic_positions_xyz =
        jn.at("mic_positions_xyz").get<std::vector<std::array<double, 3>>>();
    if (!jn.at("associated_source").is_null())
      n.associated_source = jn.at("associated_source").get<int>();
    scene.nodes.push_back(n);
  }
  validate_scene(scene);
  return scene;
}

inline void save_scene(const std::string& path, const SceneSpec& scene) {
  std::ofstream out(path);
  if (!out) throw IoError("save_scene: cannot open " + path);
  out << scene_to_json(scene).dump(2) << "\n";
}

inline SceneSpec load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_scene: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("load_scene: " + path + ": " + e.what());
  }
  return scene_from_json(j);
}

inline void save_rirs(const std::string& wav_path, const RirSet& set) {
  AudioBuffer buf;
  buf.sample_rate_hz = set.sample_rate_hz;
  nlohmann::json map = nlohmann::json::array();
  std::size_t max_len = 0;
  for (std::size_t k = 0; k < set.rirs.size(); ++k)
    for (std::size_t m = 0; m < set.rirs[k].size(); ++m)
      for (std::size_t n = 0; n < set.rirs[k][m].size(); ++n) {
        buf.channels.push_back(set.rirs[k][m][n]);
        max_len = std::max(max_len, set.rirs[k][m][n].size());
        map.push_back({{"node", k}, {"mic", m}, {"source", n}});
      }
  for (auto& ch : buf.channels) ch.resize(max_len, 0.0);
  write_wav(wav_path, buf);
  std::ofstream side(wav_path + ".json");
  if (!side) throw IoError("save_rirs: cannot write sidecar " + wav_path + ".json");
  side << nlohmann::json{{"channels", map}}.dump(2) << "\n";
}

inline void save_recording(const std::string& dir, const SceneRecording& rec) {
  AudioBuffer mix;
  mix.sample_rate_hz = rec.sample_rate_hz;
  nlohmann::json mix_map = nlohmann::json::array();
  for (std::size_t k = 0; k < rec.mixture.size(); ++k)
    for (std::size_t m = 0; m < rec.mixture[k].size(); ++m) {
      mix.channels.push_back(rec.mixture[k][m]);
      mix_map.push_back({{"node", k}, {"mic", m}});
    }
  write_wav(dir + "/mixture.wav", mix);

  AudioBuffer img;
  img.sample_rate_hz = rec.sample_rate_hz;
  nlohmann::json img_map = nlohmann::json::array();
  for (std::size_t k = 0; k < rec.images.size(); ++k)
    for (std::size_t m = 0; m < rec.images[k].size(); ++m)
      for (std::size_t n = 0; n < rec.images[k][m].size(); ++n) {
        img.channels.push_back(rec.images[k][m][n]);
        img_map.push_back({{"node", k}, {"mic", m}, {"source", n}});
      }
  write_wav(dir + "/images.wav", img);

  std::ofstream side(dir + "/recording.json");
  if (!side)
    throw IoError("save_recording: cannot write " + dir + "/recording.json");
  side << nlohmann::json{{"schema_version", 1},
                         {"sample_rate_hz", rec.sample_rate_hz},
                         {"mixture_channels", mix_map},
                         {"image_channels", img_map}}
              .dump(2)
       << "\n";
}

inline SceneRecording load_recording(const std::string& dir,
                                     const SceneSpec& scene) {
  AudioBuffer mix = read_wav(dir + "/mixture.wav");
  AudioBuffer img = read_wav(dir + "/images.wav");
  if (mix.sample_rate_hz != scene.sample_rate_hz ||
      img.sample_rate_hz != scene.sample_rate_hz)
    throw FormatError("load_recording: sample rate mismatch in " + dir);
  SceneRecording rec;
  rec.sample_rate_hz = scene.sample_rate_hz;
  std::size_t ci = 0;
  rec.mixture.resize(scene.n_nodes());
  for (int k = 0; k < scene.n_nodes(); ++k) {
    const std::size_t mics = scene.nodes[k].mic_positions_xyz.size();
    for (std::size_t m = 0; m < mics; ++m) {
      if (ci >= mix.channels.size())
        throw FormatError("load_recording: mixture.wav has too few channels");
      rec.mixture[k].push_back(mix.channels[ci++]);
    }
  }
  ci = 0;
  rec.images.resize(scene.n_nodes());
  for (int k = 0; k < scene.n_nodes(); ++k) {
    const std::size_t mics = scene.nodes[k].mic_positions_xyz.size();
    rec.images[k].resize(mics);
    for (std::size_t m = 0; m < mics; ++m) {
      for (int n = 0; n < scene.n_sources(); ++n) {
        if (ci >= img.channels.size())
          throw FormatError("load_recording: images.wav has too few channels");
        rec.images[k][m].push_back(img.channels[ci++]);
      }
    }
  }
  return rec;
}

}  // namespace distsep
