// Copyright 2026 The distsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "distsep/errors.hpp"
#include "distsep/rng.hpp"

namespace distsep {

namespace detail {

// Constant-peak-gain resonant bandpass biquad (RBJ cookbook form). Used to
// give each synthetic talker a handful of formant-like spectral peaks.
struct ResonatorState {
  double b0 = 0.0, b2 = 0.0, a1 = 0.0, a2 = 0.0;
  double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;

  ResonatorState(double center_hz, double q, int sample_rate_hz) {
    const double w0 = 2.0 * std::numbers::pi * center_hz / sample_rate_hz;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    b0 = alpha / a0;
    b2 = -alpha / a0;
    a1 = -2.0 * std::cos(w0) / a0;
    a2 = (1.0 - alpha) / a0;
  }

  double step(double x) {
    const double y = b0 * x + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = x;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace detail

// Synthetic speech-like test source: amplitude-modulated filtered noise.
//
// Filtering: Gaussian noise through a one-pole lowpass tilt plus three
// parallel resonators at talker-specific center frequencies (formant-like
// peaks in the 250-3400 Hz range). Different seeds therefore produce
// spectrally distinct talkers.
//
// Amplitude modulation: a syllabic gate alternating voiced bursts
// (120-350 ms) and pauses (150-400 ms) with raised-cosine edges, a small
// strictly positive floor during pauses, and a slow sinusoidal tremor within
// each burst. The deep gating yields the time-frequency sparsity that
// mask-driven separation relies on, while the floor keeps the signal
// non-silent everywhere.
inline std::vector<double> make_speech_like(uint64_t seed,
                                            std::size_t n_samples,
                                            int sample_rate_hz) {
  if (n_samples == 0) throw ConfigError("make_speech_like: empty length");
  if (sample_rate_hz <= 0)
    throw ConfigError("make_speech_like: bad sample rate");

  Rng rng(seed);

  // Talker-specific spectral envelope: three formant-like resonances with
  // descending weights over a faint broadband bed. The resonances carry
  // nearly all the energy so different talkers rarely collide in frequency.
  const double tilt_hz = rng.uniform(1500.0, 3000.0);
  const double f1 = rng.uniform(250.0, 700.0);
  const double f2 = rng.uniform(900.0, 1800.0);
  const double f3 = rng.uniform(2200.0, 3400.0);
  const double q1 = rng.uniform(8.0, 14.0);
  const double q2 = rng.uniform(8.0, 14.0);
  const double q3 = rng.uniform(8.0, 14.0);
  detail::ResonatorState r1(f1, q1, sample_rate_hz);
  detail::ResonatorState r2(f2, q2, sample_rate_hz);
  detail::ResonatorState r3(f3, q3, sample_rate_hz);

  const double tremor_hz = rng.uniform(4.0, 7.0);
  const double tremor_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

  // Syllabic gate schedule: voiced/pause segment lengths in samples, drawn
  // up front so the schedule is independent of the noise stream.
  struct Segment {
    std::size_t length;
    bool voiced;
    double level;
  };
  std::vector<Segment> segments;
  {
    std::size_t total = 0;
    bool voiced = rng.uniform(0.0, 1.0) < 0.7;  // usually start mid-utterance
    while (total < n_samples) {
      const double dur_s = voiced ? rng.uniform(0.12, 0.35)
                                  : rng.uniform(0.15, 0.40);
      const double level = voiced ? rng.uniform(0.6, 1.0) : 0.0;
      const std::size_t len = static_cast<std::size_t>(
          std::max(1.0, dur_s * sample_rate_hz + 0.5));
      segments.push_back({len, voiced, level});
      total += len;
      voiced = !voiced;
    }
  }

  constexpr double kPauseFloor = 0.01;
  const std::size_t edge_len = static_cast<std::size_t>(
      std::max(1.0, 0.020 * sample_rate_hz + 0.5));

  const double pole =
      std::exp(-2.0 * std::numbers::pi * tilt_hz / sample_rate_hz);
  std::vector<double> out(n_samples);
  double lp_state = 0.0;
  std::size_t seg_index = 0;
  std::size_t seg_pos = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    while (seg_pos >= segments[seg_index].length) {
      seg_pos -= segments[seg_index].length;
      ++seg_index;
    }
    const Segment& seg = segments[seg_index];

    lp_state = pole * lp_state + (1.0 - pole) * rng.gaussian();
    const double colored = 0.15 * lp_state + 4.0 * r1.step(lp_state) +
                           2.8 * r2.step(lp_state) + 1.6 * r3.step(lp_state);

    double gate = kPauseFloor;
    if (seg.voiced) {
      // Raised-cosine attack and release at the burst boundaries.
      double edge = 1.0;
      if (seg_pos < edge_len) {
        const double x = static_cast<double>(seg_pos) / edge_len;
        edge = 0.5 - 0.5 * std::cos(std::numbers::pi * x);
      }
      const std::size_t remaining = seg.length - 1 - seg_pos;
      if (remaining < edge_len) {
        const double x = static_cast<double>(remaining) / edge_len;
        edge = std::min(edge, 0.5 - 0.5 * std::cos(std::numbers::pi * x));
      }
      const double t = static_cast<double>(i) / sample_rate_hz;
      const double tremor =
          0.7 + 0.3 * std::sin(2.0 * std::numbers::pi * tremor_hz * t +
                               tremor_phase);
      gate = kPauseFloor + seg.level * tremor * edge;
    }
    out[i] = gate * colored;
    ++seg_pos;
  }
  return out;
}

}  // namespace distsep
