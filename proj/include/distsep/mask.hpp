// Copyright 2026 The distsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "distsep/errors.hpp"
#include "distsep/tensor_file.hpp"

namespace distsep {

enum class StepTag { kFirst, kSecond };

inline std::string step_tag_name(StepTag tag) {
  return tag == StepTag::kFirst ? "first-step" : "second-step";
}

// Real-valued time-frequency gain in [0,1], indexed [frame][bin]. One mask
// per node per step; the same mask is applied to every channel of that node.
struct TfMask {
  int frames = 0;
  int bins = 0;
  int node_id = -1;
  StepTag step_tag = StepTag::kFirst;
  std::vector<double> values;  // row-major [frame][bin]

  TfMask() = default;
  TfMask(int t, int f) : frames(t), bins(f), values(static_cast<std::size_t>(t) * f, 0.0) {}

  double& at(int t, int f) { return values[static_cast<std::size_t>(t) * bins + f]; }
  double at(int t, int f) const { return values[static_cast<std::size_t>(t) * bins + f]; }
};

// Ideal ratio mask from magnitude spectrograms of the node's target image and
// the summed interference at the same reference microphone:
//   mask = |s| / (|s| + |n| + eps)
// The epsilon only disambiguates 0/0 in silent bins.
inline TfMask oracle_irm(const std::vector<double>& target_mag,
                         const std::vector<double>& interferer_mag, int frames,
                         int bins, double epsilon = 1e-12) {
  const std::size_t count = static_cast<std::size_t>(frames) * bins;
  if (target_mag.size() != count || interferer_mag.size() != count)
    throw FormatError("oracle_irm: magnitude dimensions do not match frames x bins");
  if (epsilon <= 0.0) throw ConfigError("oracle_irm: epsilon must be > 0");
  TfMask mask(frames, bins);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = target_mag[i];
    const double n = interferer_mag[i];
    if (t < 0.0 || n < 0.0)
      throw ValidationError("oracle_irm: magnitudes must be non-negative");
    mask.values[i] = t / (t + n + epsilon);
  }
  return mask;
}

inline TfMask unit_mask(int frames, int bins) {
  if (frames <= 0 || bins <= 0)
    throw ConfigError("unit_mask: dimensions must be positive");
  TfMask mask(frames, bins);
  std::fill(mask.values.begin(), mask.values.end(), 1.0);
  return mask;
}

inline TfMask zero_mask(int frames, int bins) {
  if (frames <= 0 || bins <= 0)
    throw ConfigError("zero_mask: dimensions must be positive");
  return TfMask(frames, bins);
}

// Mask persistence: float64 tensor [frames, bins] plus a small JSON sidecar
// (<path>.json) carrying node id / step tag for bookkeeping.
inline void save_mask(const std::string& path, const TfMask& mask,
                      const std::string& config_hash = "") {
  write_tensor(path,
               {static_cast<uint32_t>(mask.frames), static_cast<uint32_t>(mask.bins)},
               mask.values);
  nlohmann::json sidecar;
  sidecar["node_id"] = mask.node_id;
  sidecar["step_tag"] = step_tag_name(mask.step_tag);
  sidecar["frames"] = mask.frames;
  sidecar["bins"] = mask.bins;
  if (!config_hash.empty()) sidecar["config_hash"] = config_hash;
  std::ofstream out(path + ".json");
  if (!out) throw IoError("save_mask: cannot write sidecar " + path + ".json");
  out << sidecar.dump(2) << "\n";
}

// Loads a mask tensor. Values are required to lie in [0,1]; excursions up to
// 1e-6 beyond either end are treated as serialization noise and clamped,
// anything larger is rejected. Node id and step tag are restored from the
// sidecar when one is present.
inline TfMask load_mask(const std::string& path) {
  TensorData t = read_tensor(path);
  if (t.dtype != TensorDtype::kF64 || t.dims.size() != 2)
    throw FormatError("load_mask: expected 2-d float64 tensor: " + path);
  TfMask mask(static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]));
  constexpr double kSlack = 1e-6;
  for (std::size_t i = 0; i < t.f64.size(); ++i) {
    const double v = t.f64[i];
    if (!(v >= -kSlack && v <= 1.0 + kSlack))
      throw ValidationError("load_mask: value " + std::to_string(v) +
                            " outside [0,1] in " + path);
    mask.values[i] = std::min(1.0, std::max(0.0, v));
  }
  std::ifstream side(path + ".json");
  if (side) {
    try {
      nlohmann::json sidecar = nlohmann::json::parse(side);
      mask.node_id = sidecar.value("node_id", mask.node_id);
      if (sidecar.value("step_tag", "") == step_tag_name(StepTag::kSecond))
        mask.step_tag = StepTag::kSecond;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("load_mask: bad sidecar ") + path +
                        ".json: " + e.what());
    }
  }
  return mask;
}

// Provider plumbing. The trained-network mask estimators that this interface
// stands in for are out of scope; what ships is the oracle (precomputed from
// the scene's source images), file-loaded masks, and the trivial unit mask.
struct MaskProviderConfig {
  std::string kind = "oracle-irm";  // oracle-irm | file | unit
  std::string file_dir;             // for kind == "file"
  double epsilon = 1e-12;

  void validate() const {
    if (kind != "oracle-irm" && kind != "file" && kind != "unit")
      throw ConfigError("mask provider: unknown kind '" + kind + "'");
    if (kind == "file" && file_dir.empty())
      throw ConfigError("mask provider: kind 'file' requires a mask directory");
    if (epsilon <= 0.0) throw ConfigError("mask provider: epsilon must be > 0");
  }
};

struct MaskRequest {
  int node_id = 0;  // 0-based
  StepTag step = StepTag::kFirst;
  int frames = 0;
  int bins = 0;
};

class MaskProvider {
 public:
  virtual ~MaskProvider() = default;
  virtual TfMask get_mask(const MaskRequest& req) = 0;
};

class UnitMaskProvider final : public MaskProvider {
 public:
  TfMask get_mask(const MaskRequest& req) override {
    TfMask mask = unit_mask(req.frames, req.bins);
    mask.node_id = req.node_id;
    mask.step_tag = req.step;
    return mask;
  }
};

// Serves masks computed ahead of time, one per node; both steps reuse the
// same mask object so step-two covariance estimation sees the identical
// gains on every stacked channel.
class PrecomputedMaskProvider final : public MaskProvider {
 public:
  explicit PrecomputedMaskProvider(std::vector<TfMask> masks)
      : masks_(std::move(masks)) {}

  TfMask get_mask(const MaskRequest& req) override {
    if (req.node_id < 0 || req.node_id >= static_cast<int>(masks_.size()))
      throw ProviderError("mask provider: no mask for node " +
                          std::to_string(req.node_id));
    TfMask mask = masks_[req.node_id];
    if (mask.frames != req.frames || mask.bins != req.bins)
      throw FormatError("mask provider: node " + std::to_string(req.node_id) +
                        " mask is " + std::to_string(mask.frames) + "x" +
                        std::to_string(mask.bins) + ", expected " +
                        std::to_string(req.frames) + "x" +
                        std::to_string(req.bins));
    mask.node_id = req.node_id;
    mask.step_tag = req.step;
    return mask;
  }

 private:
  std::vector<TfMask> masks_;
};

// Loads mask_node<k>_step<1|2>.dst from a directory on demand.
class FileMaskProvider final : public MaskProvider {
 public:
  explicit FileMaskProvider(std::string dir) : dir_(std::move(dir)) {}

  static std::string file_name(int node_id, StepTag step) {
    return "mask_node" + std::to_string(node_id) + "_step" +
           std::string(step == StepTag::kFirst ? "1" : "2") + ".dst";
  }

  TfMask get_mask(const MaskRequest& req) override {
    const std::string path = dir_ + "/" + file_name(req.node_id, req.step);
    TfMask mask;
    try {
      mask = load_mask(path);
    } catch (const Error& e) {
      throw ProviderError("mask provider: node " + std::to_string(req.node_id) +
                          ": " + e.what());
    }
    if (mask.frames != req.frames || mask.bins != req.bins)
      throw FormatError("mask provider: " + path + " is " +
                        std::to_string(mask.frames) + "x" +
                        std::to_string(mask.bins) + ", expected " +
                        std::to_string(req.frames) + "x" +
                        std::to_string(req.bins));
    mask.node_id = req.node_id;
    mask.step_tag = req.step;
    return mask;
  }

 private:
  std::string dir_;
};

}  // namespace distsep
