// Copyright 2026 The distsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Two-step distributed separation protocol. Each node runs a local
// mask-driven Wiener filter over its own microphones and broadcasts the
// resulting single-channel compressed signal; every node then stacks the
// K-1 received compressed signals under its local channels and runs a
// second Wiener filter over the stack. Nodes are isolated state machines;
// the exchange is the only communication and acts as a barrier.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "distsep/beamform.hpp"
#include "distsep/errors.hpp"
#include "distsep/mask.hpp"
#include "distsep/scene.hpp"
#include "distsep/stft.hpp"

namespace distsep {

struct SeparationConfig {
  StftConfig stft;
  MaskProviderConfig provider_step1;
  MaskProviderConfig provider_step2;
  double loading = 1e-9;
  double residual_tol = 1e-8;
  double silence_threshold_db = -60.0;
  bool exclude_silent = false;

  void validate() const {
    stft.validate();
    provider_step1.validate();
    provider_step2.validate();
    if (loading < 0.0) throw ConfigError("separation: loading must be >= 0");
    if (!std::isfinite(silence_threshold_db))
      throw ConfigError("separation: silence threshold must be finite");
  }
};

struct CompressedMessage {
  int sender_id = -1;
  SpectrogramTensor payload;  // single channel, sender's frames x bins
  bool silence_flag = false;
  double rel_power_db = 0.0;  // payload power relative to sender input power
};

struct NodeState {
  int node_id = -1;
  SpectrogramTensor local_spec;  // M_k local mic channels
  TfMask mask_step1;
  TfMask mask_step2;
  FilterBank w_local;
  SpectrogramTensor compressed_out;
  std::vector<CompressedMessage> received;  // K-1, ascending sender id
  SpectrogramTensor stacked;
  FilterBank w_fused;
  std::vector<double> estimate;
};

struct NodeResult {
  int node_id = -1;
  std::vector<double> estimate;    // fused output, mixture length
  std::vector<double> compressed;  // istft of the broadcast signal
  TfMask mask_step1;
  TfMask mask_step2;
  FilterBank w_local;
  FilterBank w_fused;
  bool silence_flag = false;
  double compressed_rel_power_db = 0.0;
};

struct SeparationOutput {
  std::string scene_id;
  std::vector<NodeResult> nodes;
  std::map<std::string, double> timings_ms;

  nlohmann::json silence_report() const {
    nlohmann::json report = nlohmann::json::array();
    for (const auto& n : nodes) {
      report.push_back({{"node_id", n.node_id},
                        {"silence_flag", n.silence_flag},
                        {"rel_power_db", n.compressed_rel_power_db}});
    }
    return report;
  }
};

namespace detail {

// Rethrows library errors with the node/stage named, preserving the most
// informative exception types.
template <typename Fn>
auto with_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const FormatError& e) {
    throw FormatError(stage + ": " + e.what());
  } catch (const ProviderError& e) {
    throw ProviderError(stage + ": " + e.what());
  } catch (const EstimationError& e) {
    throw EstimationError(stage + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(stage + ": " + e.what());
  } catch (const Error& e) {
    throw ProtocolError(stage + ": " + e.what());
  }
}

inline double mean_power(const SpectrogramTensor& spec) {
  double acc = 0.0;
  for (const auto& v : spec.data) acc += std::norm(v);
  return spec.data.empty() ? 0.0 : acc / static_cast<double>(spec.data.size());
}

}  // namespace detail

// Step one at node k: estimate the local filter from masked covariances and
// form the compressed signal z_k. A payload whose mean power falls below the
// configured threshold relative to the node's own input marks the message
// silent (the over-determined failure mode: a node with no target speaker
// compresses to near-silence).
inline CompressedMessage local_step(NodeState& node, MaskProvider& provider,
                                    const SeparationConfig& config) {
  const std::string stage =
      "node " + std::to_string(node.node_id) + " local step";
  return detail::with_stage(stage, [&]() -> CompressedMessage {
    MaskRequest req;
    req.node_id = node.node_id;
    req.step = StepTag::kFirst;
    req.frames = node.local_spec.frames;
    req.bins = node.local_spec.bins;
    node.mask_step1 = provider.get_mask(req);

    const CovarianceSet cov =
        estimate_covariances(node.local_spec, node.mask_step1);
    node.w_local = compute_mwf(cov, /*ref_index=*/0, config.loading,
                               config.residual_tol);
    if (static_cast<int>(node.w_local.degenerate_bins.size()) ==
        node.w_local.bins)
      throw ProtocolError("every frequency bin degenerate");
    node.compressed_out = apply_filterbank(node.w_local, node.local_spec);
    node.compressed_out.channel_labels[0] =
        "z:" + std::to_string(node.node_id);

    CompressedMessage msg;
    msg.sender_id = node.node_id;
    msg.payload = node.compressed_out;
    const double p_in = detail::mean_power(node.local_spec);
    const double p_z = detail::mean_power(node.compressed_out);
    if (p_z <= 0.0 || p_in <= 0.0) {
      msg.rel_power_db = -999.0;
      msg.silence_flag = true;
    } else {
      msg.rel_power_db = 10.0 * std::log10(p_z / p_in);
      msg.silence_flag = msg.rel_power_db < config.silence_threshold_db;
    }
    return msg;
  });
}

// Ideal lossless broadcast: node k receives every other node's message in
// ascending sender order.
inline std::vector<std::vector<CompressedMessage>> exchange(
    const std::vector<CompressedMessage>& messages) {
  const int k_total = static_cast<int>(messages.size());
  if (k_total == 0) throw ProtocolError("exchange: no messages");
  std::vector<const CompressedMessage*> by_sender(k_total, nullptr);
  for (const auto& m : messages) {
    if (m.sender_id < 0 || m.sender_id >= k_total)
      throw ProtocolError("exchange: sender id " +
                          std::to_string(m.sender_id) + " out of range");
    if (by_sender[m.sender_id] != nullptr)
      throw ProtocolError("exchange: duplicate message from node " +
                          std::to_string(m.sender_id));
    by_sender[m.sender_id] = &m;
  }
  for (int j = 0; j < k_total; ++j)
    if (by_sender[j] == nullptr)
      throw ProtocolError("exchange: missing message from node " +
                          std::to_string(j));
  const int frames = by_sender[0]->payload.frames;
  const int bins = by_sender[0]->payload.bins;
  for (int j = 1; j < k_total; ++j)
    if (by_sender[j]->payload.frames != frames ||
        by_sender[j]->payload.bins != bins)
      throw FormatError("exchange: payload dimensions differ at node " +
                        std::to_string(j));

  std::vector<std::vector<CompressedMessage>> received(k_total);
  for (int k = 0; k < k_total; ++k) {
    for (int j = 0; j < k_total; ++j) {
      if (j == k) continue;
      received[k].push_back(*by_sender[j]);
    }
  }
  return received;
}

// Step two at node k: stack [local mics, then received z_j ascending j],
// optionally dropping silent compressed channels, and estimate the final
// filter over the stack. The estimate targets the node's first local mic.
inline std::vector<double> fuse_step(NodeState& node, MaskProvider& provider,
                                     const SeparationConfig& config,
                                     std::size_t out_len) {
  const std::string stage =
      "node " + std::to_string(node.node_id) + " fuse step";
  return detail::with_stage(stage, [&]() -> std::vector<double> {
    const int m_local = node.local_spec.channels;
    std::vector<const CompressedMessage*> kept;
    for (const auto& msg : node.received) {
      if (config.exclude_silent && msg.silence_flag) continue;
      kept.push_back(&msg);
    }
    node.stacked = SpectrogramTensor(node.local_spec.config,
                                     m_local + static_cast<int>(kept.size()),
                                     node.local_spec.frames,
                                     node.local_spec.bins);
    for (int c = 0; c < m_local; ++c) {
      node.stacked.channel_labels[c] = node.local_spec.channel_labels[c];
      std::copy(&node.local_spec.at(c, 0, 0),
                &node.local_spec.at(c, 0, 0) +
                    static_cast<std::size_t>(node.local_spec.frames) *
                        node.local_spec.bins,
                &node.stacked.at(c, 0, 0));
    }
    for (std::size_t i = 0; i < kept.size(); ++i) {
      const int c = m_local + static_cast<int>(i);
      if (kept[i]->payload.frames != node.stacked.frames ||
          kept[i]->payload.bins != node.stacked.bins)
        throw FormatError("received payload dimension mismatch from node " +
                          std::to_string(kept[i]->sender_id));
      node.stacked.channel_labels[c] =
          "z:" + std::to_string(kept[i]->sender_id);
      std::copy(kept[i]->payload.data.begin(), kept[i]->payload.data.end(),
                &node.stacked.at(c, 0, 0));
    }

    MaskRequest req;
    req.node_id = node.node_id;
    req.step = StepTag::kSecond;
    req.frames = node.stacked.frames;
    req.bins = node.stacked.bins;
    node.mask_step2 = provider.get_mask(req);

    const CovarianceSet cov = estimate_covariances(node.stacked, node.mask_step2);
    node.w_fused = compute_mwf(cov, /*ref_index=*/0, config.loading,
                               config.residual_tol);
    const SpectrogramTensor est_spec =
        apply_filterbank(node.w_fused, node.stacked);
    node.estimate = istft(est_spec, config.stft, out_len);
    return node.estimate;
  });
}

// Builds the per-step mask providers for a recording. Oracle masks are
// precomputed from the scene's source images at each node's reference mic:
// target = |image of the node's own source|, interference = |sum of the
// other sources' images|. Nodes beyond the source count have no target and
// get an all-zero mask. Both steps share one oracle provider, so the second
// step reuses the identical mask.
inline std::shared_ptr<MaskProvider> make_mask_provider(
    const MaskProviderConfig& cfg, const SceneRecording& recording,
    const StftConfig& stft_cfg) {
  cfg.validate();
  if (cfg.kind == "unit") return std::make_shared<UnitMaskProvider>();
  if (cfg.kind == "file") return std::make_shared<FileMaskProvider>(cfg.file_dir);

  const int k_total = static_cast<int>(recording.images.size());
  std::vector<TfMask> masks;
  for (int k = 0; k < k_total; ++k) {
    const int n_sources = static_cast<int>(recording.images[k][0].size());
    const std::size_t len = recording.mixture[k][0].size();
    const int frames = stft_frame_count(len, stft_cfg);
    const int bins = stft_cfg.bins();
    const std::size_t count = static_cast<std::size_t>(frames) * bins;

    std::vector<double> target_mag(count, 0.0);
    if (k < n_sources) {
      const SpectrogramTensor t = stft(recording.images[k][0][k], stft_cfg);
      for (std::size_t i = 0; i < count; ++i)
        target_mag[i] = std::abs(t.data[i]);
    }
    std::vector<double> interferer(len, 0.0);
    for (int j = 0; j < n_sources; ++j) {
      if (j == k) continue;
      for (std::size_t i = 0; i < len; ++i)
        interferer[i] += recording.images[k][0][j][i];
    }
    std::vector<double> interferer_mag(count, 0.0);
    const SpectrogramTensor ispec = stft(interferer, stft_cfg);
    for (std::size_t i = 0; i < count; ++i)
      interferer_mag[i] = std::abs(ispec.data[i]);

    TfMask mask =
        oracle_irm(target_mag, interferer_mag, frames, bins, cfg.epsilon);
    mask.node_id = k;
    masks.push_back(std::move(mask));
  }
  return std::make_shared<PrecomputedMaskProvider>(std::move(masks));
}

// Runs the full two-step protocol on one rendered scene: analysis, local
// filtering at every node, one synchronized exchange round, fusion at every
// node, synthesis. Deterministic for fixed inputs and config.
inline SeparationOutput run_separation(const SceneRecording& recording,
                                       const SeparationConfig& config) {
  config.validate();
  if (recording.mixture.empty() || recording.mixture[0].empty())
    throw ConfigError("run_separation: empty recording");
  const int k_total = static_cast<int>(recording.mixture.size());
  const std::size_t out_len = recording.mixture[0][0].size();

  using Clock = std::chrono::steady_clock;
  auto ms_since = [](Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };
  SeparationOutput output;
  const auto t_start = Clock::now();

  std::shared_ptr<MaskProvider> provider1 =
      make_mask_provider(config.provider_step1, recording, config.stft);
  std::shared_ptr<MaskProvider> provider2;
  if (config.provider_step2.kind == config.provider_step1.kind &&
      config.provider_step2.epsilon == config.provider_step1.epsilon &&
      config.provider_step2.file_dir == config.provider_step1.file_dir) {
    provider2 = provider1;  // oracle masks identical across steps by design
  } else {
    provider2 = make_mask_provider(config.provider_step2, recording, config.stft);
  }

  auto t0 = Clock::now();
  std::vector<NodeState> nodes(k_total);
  for (int k = 0; k < k_total; ++k) {
    nodes[k].node_id = k;
    nodes[k].local_spec = detail::with_stage(
        "node " + std::to_string(k) + " stft",
        [&] { return stft(recording.mixture[k], config.stft); });
    for (std::size_t m = 0; m < recording.mixture[k].size(); ++m)
      nodes[k].local_spec.channel_labels[m] =
          "mic:" + std::to_string(k) + ":" + std::to_string(m);
  }
  output.timings_ms["stft_ms"] = ms_since(t0);

  t0 = Clock::now();
  std::vector<CompressedMessage> messages;
  for (int k = 0; k < k_total; ++k)
    messages.push_back(local_step(nodes[k], *provider1, config));
  output.timings_ms["local_ms"] = ms_since(t0);

  t0 = Clock::now();
  auto received = exchange(messages);
  for (int k = 0; k < k_total; ++k) nodes[k].received = std::move(received[k]);
  output.timings_ms["exchange_ms"] = ms_since(t0);

  t0 = Clock::now();
  for (int k = 0; k < k_total; ++k)
    fuse_step(nodes[k], *provider2, config, out_len);
  output.timings_ms["fuse_ms"] = ms_since(t0);

  t0 = Clock::now();
  for (int k = 0; k < k_total; ++k) {
    NodeResult res;
    res.node_id = k;
    res.estimate = std::move(nodes[k].estimate);
    res.compressed = detail::with_stage(
        "node " + std::to_string(k) + " compressed istft", [&] {
          return istft(nodes[k].compressed_out, config.stft, out_len);
        });
    res.mask_step1 = std::move(nodes[k].mask_step1);
    res.mask_step2 = std::move(nodes[k].mask_step2);
    res.w_local = std::move(nodes[k].w_local);
    res.w_fused = std::move(nodes[k].w_fused);
    res.silence_flag = messages[k].silence_flag;
    res.compressed_rel_power_db = messages[k].rel_power_db;
    output.nodes.push_back(std::move(res));
  }
  output.timings_ms["istft_ms"] = ms_since(t0);
  output.timings_ms["total_ms"] = ms_since(t_start);
  return output;
}

}  // namespace distsep
