// Copyright 2026 The distsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <filesystem>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "distsep/danse.hpp"
#include "distsep/errors.hpp"
#include "distsep/eval.hpp"
#include "distsep/scene.hpp"
#include "distsep/synth.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace distsep;

namespace {

// 62 hops exactly cover this length, so istft loses no tail samples.
constexpr std::size_t kLen = 15872;

std::vector<std::vector<double>> speech_dry(int n, uint64_t seed_base) {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < n; ++i)
    out.push_back(make_speech_like(seed_base + i, kLen, 16000));
  return out;
}

SceneRecording make_recording(uint64_t seed, int n_sources, int n_nodes,
                              int mics) {
  SceneSampleParams params;
  params.mics_per_node = mics;
  SceneSpec scene = sample_scene(seed, n_sources, n_nodes, params);
  RirSet rirs = compute_rirs(scene);
  return render_scene(scene, rirs, speech_dry(n_sources, 40 + seed));
}

SeparationConfig oracle_config() { return SeparationConfig{}; }

// A one-channel message with constant payload, for exchange tests.
CompressedMessage tiny_message(int sender, double value, int frames = 2,
                               int bins = 3) {
  CompressedMessage msg;
  msg.sender_id = sender;
  msg.payload = SpectrogramTensor(StftConfig{}, 1, frames, bins);
  for (auto& v : msg.payload.data) v = value;
  return msg;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  EXPECT_EQ(a.size(), b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double max_abs(const std::vector<double>& a) {
  double worst = 0.0;
  for (double v : a) worst = std::max(worst, std::abs(v));
  return worst;
}

// Shared two-node scene so the heavier protocol tests render it only once.
class TwoNodeScene : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    recording_ = new SceneRecording(make_recording(61, 2, 2, 4));
  }
  static void TearDownTestSuite() {
    delete recording_;
    recording_ = nullptr;
  }
  static SceneRecording* recording_;
};

SceneRecording* TwoNodeScene::recording_ = nullptr;

}  // namespace

// ---------------------------------------------------------------------------
// Local step

TEST(LocalStep, ProducesLabeledCompressedSignal) {
  NodeState node;
  node.node_id = 3;
  std::vector<std::vector<double>> sig;
  for (int m = 0; m < 2; ++m) sig.push_back(make_speech_like(70 + m, kLen, 16000));
  node.local_spec = stft(sig, StftConfig{});
  UnitMaskProvider provider;
  CompressedMessage msg = local_step(node, provider, oracle_config());
  EXPECT_EQ(msg.sender_id, 3);
  EXPECT_EQ(msg.payload.channels, 1);
  EXPECT_EQ(msg.payload.frames, node.local_spec.frames);
  EXPECT_EQ(msg.payload.bins, node.local_spec.bins);
  EXPECT_EQ(msg.payload.channel_labels[0], "z:3");
  EXPECT_FALSE(msg.silence_flag);
  EXPECT_GT(msg.rel_power_db, -60.0);
}

TEST(LocalStep, ZeroMaskYieldsExactSilenceAndFlag) {
  NodeState node;
  node.node_id = 0;
  node.local_spec = stft(make_speech_like(71, kLen, 16000), StftConfig{});
  const int frames = node.local_spec.frames;
  TfMask zero = zero_mask(frames, 257);
  zero.node_id = 0;
  PrecomputedMaskProvider provider({zero});
  CompressedMessage msg = local_step(node, provider, oracle_config());
  EXPECT_TRUE(msg.silence_flag);
  EXPECT_EQ(msg.rel_power_db, -999.0);
  for (const auto& v : msg.payload.data) ASSERT_EQ(std::abs(v), 0.0);
}

TEST(LocalStep, MaskDimensionMismatchNamesTheNode) {
  NodeState node;
  node.node_id = 0;
  node.local_spec = stft(make_speech_like(72, kLen, 16000), StftConfig{});
  TfMask wrong = unit_mask(3, 257);
  wrong.node_id = 0;
  PrecomputedMaskProvider provider({wrong});
  try {
    local_step(node, provider, oracle_config());
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("node 0"), std::string::npos);
  }
}

// ---------------------------------------------------------------------------
// Exchange

TEST(Exchange, EveryNodeReceivesOthersAscending) {
  std::vector<CompressedMessage> msgs;
  for (int k = 0; k < 4; ++k) msgs.push_back(tiny_message(k, 10.0 + k));
  auto received = exchange(msgs);
  ASSERT_EQ(received.size(), 4u);
  const std::vector<std::vector<int>> expect = {
      {1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (int k = 0; k < 4; ++k) {
    ASSERT_EQ(received[k].size(), 3u);
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ(received[k][i].sender_id, expect[k][i]);
      EXPECT_EQ(received[k][i].payload.data[0].real(),
                10.0 + expect[k][i]);
    }
  }
}

TEST(Exchange, OrderComesFromSenderIdsNotArrivalOrder) {
  std::vector<CompressedMessage> msgs;
  for (int k : {2, 0, 1}) msgs.push_back(tiny_message(k, k * 1.0));
  auto received = exchange(msgs);
  ASSERT_EQ(received[0].size(), 2u);
  EXPECT_EQ(received[0][0].sender_id, 1);
  EXPECT_EQ(received[0][1].sender_id, 2);
}

TEST(Exchange, SingleNodeReceivesNothing) {
  auto received = exchange({tiny_message(0, 1.0)});
  ASSERT_EQ(received.size(), 1u);
  EXPECT_TRUE(received[0].empty());
}

TEST(Exchange, ProtocolViolationsThrow) {
  EXPECT_THROW(exchange({}), ProtocolError);
  EXPECT_THROW(exchange({tiny_message(0, 1.0), tiny_message(0, 2.0)}),
               ProtocolError);
  EXPECT_THROW(exchange({tiny_message(0, 1.0), tiny_message(5, 2.0)}),
               ProtocolError);
  EXPECT_THROW(
      exchange({tiny_message(0, 1.0), tiny_message(1, 2.0, 3, 3)}),
      FormatError);
}

// ---------------------------------------------------------------------------
// Full protocol

TEST(RunSeparation, SingleNodeFusedEqualsCompressedBitwise) {
  SceneRecording rec = make_recording(60, 1, 1, 4);
  SeparationOutput out = run_separation(rec, oracle_config());
  ASSERT_EQ(out.nodes.size(), 1u);
  const NodeResult& node = out.nodes[0];
  ASSERT_EQ(node.estimate.size(), kLen);
  ASSERT_EQ(node.estimate, node.compressed);
  EXPECT_EQ(node.w_fused.channels, node.w_local.channels);

  // One node, one talker, a near-unit oracle mask: the estimate should be a
  // near-perfect reconstruction of the reference-mic image. Synthesis fades
  // the partially covered leading/trailing window regions, so the
  // near-identity claim is checked on the fully overlapped interior.
  const std::size_t edge = 512;
  std::vector<double> est(node.estimate.begin() + edge,
                          node.estimate.end() - edge);
  std::vector<double> ref(rec.images[0][0][0].begin() + edge,
                          rec.images[0][0][0].end() - edge);
  const double score = si_sdr(est, ref);
  EXPECT_GT(score, 40.0);
}

TEST_F(TwoNodeScene, OutputShapesAndTimings) {
  SeparationOutput out = run_separation(*recording_, oracle_config());
  ASSERT_EQ(out.nodes.size(), 2u);
  for (int k = 0; k < 2; ++k) {
    EXPECT_EQ(out.nodes[k].node_id, k);
    EXPECT_EQ(out.nodes[k].estimate.size(), kLen);
    EXPECT_EQ(out.nodes[k].compressed.size(), kLen);
    EXPECT_EQ(out.nodes[k].w_local.channels, 4);
    EXPECT_EQ(out.nodes[k].w_fused.channels, 5);  // 4 local + 1 received
    EXPECT_FALSE(out.nodes[k].silence_flag);
  }
  for (const char* key : {"stft_ms", "local_ms", "exchange_ms", "fuse_ms",
                          "istft_ms", "total_ms"})
    EXPECT_TRUE(out.timings_ms.count(key)) << key;
}

TEST_F(TwoNodeScene, DeterministicAcrossRuns) {
  SeparationOutput a = run_separation(*recording_, oracle_config());
  SeparationOutput b = run_separation(*recording_, oracle_config());
  for (int k = 0; k < 2; ++k) {
    ASSERT_EQ(a.nodes[k].estimate, b.nodes[k].estimate);
    ASSERT_EQ(a.nodes[k].compressed, b.nodes[k].compressed);
  }
}

TEST_F(TwoNodeScene, FusionImprovesOnTheMixture) {
  SeparationOutput out = run_separation(*recording_, oracle_config());
  for (int k = 0; k < 2; ++k) {
    const auto& ref = recording_->images[k][0][k];
    const double in = si_sdr(recording_->mixture[k][0], ref);
    const double fused = si_sdr(out.nodes[k].estimate, ref);
    EXPECT_GT(fused, in) << "node " << k;
  }
}

TEST_F(TwoNodeScene, NodeRelabelingPermutesOutputsBitwise) {
  SeparationOutput base = run_separation(*recording_, oracle_config());
  SceneRecording swapped = *recording_;
  std::swap(swapped.mixture[0], swapped.mixture[1]);
  std::swap(swapped.images[0], swapped.images[1]);
  std::swap(swapped.dry_sources[0], swapped.dry_sources[1]);
  // Swap the source dimension inside every node's image stack as well, so
  // node k's own talker is still source k after relabeling.
  for (auto& node_images : swapped.images)
    for (auto& mic_images : node_images)
      std::swap(mic_images[0], mic_images[1]);
  SeparationOutput perm = run_separation(swapped, oracle_config());
  for (int k = 0; k < 2; ++k) {
    ASSERT_EQ(perm.nodes[k].estimate, base.nodes[1 - k].estimate);
    ASSERT_EQ(perm.nodes[k].compressed, base.nodes[1 - k].compressed);
  }
}

TEST(RunSeparation, ThreeNodeRelabelingIsEquivariantNumerically) {
  SceneRecording rec = make_recording(62, 3, 3, 2);
  SeparationConfig config = oracle_config();
  SeparationOutput base = run_separation(rec, config);

  // Cyclic relabeling pi(k) = (k + 1) % 3: new index k holds old pi(k).
  const std::array<int, 3> pi = {1, 2, 0};
  SceneRecording rot;
  rot.sample_rate_hz = rec.sample_rate_hz;
  rot.mixture.resize(3);
  rot.images.resize(3);
  rot.dry_sources.resize(3);
  for (int k = 0; k < 3; ++k) {
    rot.mixture[k] = rec.mixture[pi[k]];
    rot.dry_sources[k] = rec.dry_sources[pi[k]];
    rot.images[k].resize(rec.images[pi[k]].size());
    for (std::size_t m = 0; m < rec.images[pi[k]].size(); ++m) {
      rot.images[k][m].resize(3);
      for (int n = 0; n < 3; ++n)
        rot.images[k][m][n] = rec.images[pi[k]][m][pi[n]];
    }
  }
  SeparationOutput perm = run_separation(rot, config);
  for (int k = 0; k < 3; ++k) {
    // The stacked channel order differs under relabeling, so the linear
    // solves run with permuted pivoting; agreement is to solver precision,
    // not bitwise (a genuine equivariance bug would be O(1)).
    const double scale = std::max(max_abs(base.nodes[pi[k]].estimate), 1e-30);
    ASSERT_LT(max_abs_diff(perm.nodes[k].estimate, base.nodes[pi[k]].estimate),
              1e-8 * scale)
        << "node " << k;
  }
}

TEST(RunSeparation, UnassociatedNodeGoesSilentAndOthersStillFuse) {
  SceneRecording rec = make_recording(63, 2, 3, 1);
  SeparationConfig config = oracle_config();
  SeparationOutput out = run_separation(rec, config);
  ASSERT_EQ(out.nodes.size(), 3u);

  EXPECT_TRUE(out.nodes[2].silence_flag);
  EXPECT_EQ(out.nodes[2].compressed_rel_power_db, -999.0);
  for (double v : out.nodes[2].compressed) ASSERT_EQ(v, 0.0);
  EXPECT_FALSE(out.nodes[0].silence_flag);
  EXPECT_FALSE(out.nodes[1].silence_flag);
  for (int k = 0; k < 3; ++k)
    EXPECT_EQ(out.nodes[k].w_fused.channels, 3);  // 1 local + 2 received

  auto report = out.silence_report();
  ASSERT_EQ(report.size(), 3u);
  EXPECT_EQ(report[2]["node_id"], 2);
  EXPECT_TRUE(report[2]["silence_flag"].get<bool>());
  EXPECT_EQ(report[2]["rel_power_db"], -999.0);

  // Excluding silent channels shrinks the stack at the receiving nodes only.
  config.exclude_silent = true;
  SeparationOutput ex = run_separation(rec, config);
  EXPECT_EQ(ex.nodes[0].w_fused.channels, 2);
  EXPECT_EQ(ex.nodes[1].w_fused.channels, 2);
  EXPECT_EQ(ex.nodes[2].w_fused.channels, 3);
}

TEST(RunSeparation, FileMasksReproduceUnitProviderBitwise) {
  fs::path dir = fs::temp_directory_path() / "distsep_file_masks";
  fs::remove_all(dir);
  fs::create_directories(dir);
  SceneRecording rec = make_recording(64, 2, 2, 2);
  const int frames = stft_frame_count(kLen, StftConfig{});

  for (int k = 0; k < 2; ++k) {
    for (StepTag step : {StepTag::kFirst, StepTag::kSecond}) {
      TfMask ones = unit_mask(frames, 257);
      ones.node_id = k;
      ones.step_tag = step;
      save_mask((dir / FileMaskProvider::file_name(k, step)).string(), ones);
    }
  }

  SeparationConfig unit_cfg = oracle_config();
  unit_cfg.provider_step1.kind = "unit";
  unit_cfg.provider_step2.kind = "unit";
  SeparationConfig file_cfg = oracle_config();
  file_cfg.provider_step1.kind = "file";
  file_cfg.provider_step1.file_dir = dir.string();
  file_cfg.provider_step2.kind = "file";
  file_cfg.provider_step2.file_dir = dir.string();

  SeparationOutput a = run_separation(rec, unit_cfg);
  SeparationOutput b = run_separation(rec, file_cfg);
  for (int k = 0; k < 2; ++k)
    ASSERT_EQ(a.nodes[k].estimate, b.nodes[k].estimate);
  fs::remove_all(dir);
}

TEST(RunSeparation, MissingMaskFileNamesNodeAndStage) {
  SceneRecording rec = make_recording(65, 1, 1, 1);
  SeparationConfig config = oracle_config();
  config.provider_step1.kind = "file";
  config.provider_step1.file_dir = "/nonexistent/masks";
  config.provider_step2 = config.provider_step1;
  try {
    run_separation(rec, config);
    FAIL() << "expected ProviderError";
  } catch (const ProviderError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("node 0"), std::string::npos) << msg;
  }
}

TEST(RunSeparation, InvalidInputsThrow) {
  EXPECT_THROW(run_separation(SceneRecording{}, oracle_config()), ConfigError);
  SceneRecording rec = make_recording(66, 1, 1, 1);
  SeparationConfig config = oracle_config();
  config.loading = -1.0;
  EXPECT_THROW(run_separation(rec, config), ConfigError);
  config = oracle_config();
  config.stft.window = "unknown";
  EXPECT_THROW(run_separation(rec, config), ConfigError);
}
