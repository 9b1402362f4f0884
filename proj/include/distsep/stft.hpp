// Copyright 2026 The distsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "distsep/errors.hpp"
#include "distsep/fft.hpp"
#include "distsep/tensor_file.hpp"

namespace distsep {

// Analysis/synthesis framing. Defaults: 16 kHz, 32 ms periodic Hann window,
// 16 ms hop, one-sided 257-bin spectrum.
struct StftConfig {
  int sample_rate_hz = 16000;
  int window_len = 512;
  int hop = 256;
  std::string window = "hann";

  int bins() const { return window_len / 2 + 1; }

  bool operator==(const StftConfig&) const = default;

  void validate() const {
    if (sample_rate_hz <= 0) throw ConfigError("stft: sample rate must be > 0");
    if (!Fft::is_pow2(window_len))
      throw ConfigError("stft: window_len must be a power of two, got " +
                        std::to_string(window_len));
    if (hop <= 0 || hop > window_len)
      throw ConfigError("stft: hop must be in (0, window_len]");
    if (window != "hann" && window != "rect")
      throw ConfigError("stft: unknown window '" + window + "'");
  }
};

inline std::vector<double> make_window(const StftConfig& cfg) {
  std::vector<double> w(cfg.window_len, 1.0);
  if (cfg.window == "hann") {
    // Periodic Hann; sums to a constant at 50% overlap.
    for (int n = 0; n < cfg.window_len; ++n)
      w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / cfg.window_len);
  }
  return w;
}

// Number of analysis frames for an input of `len` samples. Inputs shorter
// than one window are zero-padded into a single frame; otherwise trailing
// samples that do not fill a whole extra window are not framed.
inline int stft_frame_count(std::size_t len, const StftConfig& cfg) {
  if (len == 0) throw FormatError("stft: empty input");
  if (len < static_cast<std::size_t>(cfg.window_len)) return 1;
  return static_cast<int>((len - cfg.window_len) / cfg.hop) + 1;
}

// Complex STFT data, indexed [channel][frame][bin]. Carries the framing
// config and a role label per channel ("mic:<k>:<m>" for local microphones,
// "z:<j>" for compressed signals received from node j).
struct SpectrogramTensor {
  StftConfig config;
  int channels = 0;
  int frames = 0;
  int bins = 0;
  std::vector<std::string> channel_labels;
  std::vector<std::complex<double>> data;

  SpectrogramTensor() = default;
  SpectrogramTensor(const StftConfig& cfg, int c, int t, int f)
      : config(cfg),
        channels(c),
        frames(t),
        bins(f),
        channel_labels(c),
        data(static_cast<std::size_t>(c) * t * f) {}

  std::complex<double>& at(int c, int t, int f) {
    return data[(static_cast<std::size_t>(c) * frames + t) * bins + f];
  }
  const std::complex<double>& at(int c, int t, int f) const {
    return data[(static_cast<std::size_t>(c) * frames + t) * bins + f];
  }

  bool same_shape(const SpectrogramTensor& o) const {
    return frames == o.frames && bins == o.bins;
  }
};

// Multichannel STFT. All channels must have equal length.
inline SpectrogramTensor stft(const std::vector<std::vector<double>>& waveform,
                              const StftConfig& cfg) {
  cfg.validate();
  if (waveform.empty() || waveform[0].empty())
    throw FormatError("stft: empty input");
  const std::size_t len = waveform[0].size();
  for (const auto& ch : waveform)
    if (ch.size() != len) throw FormatError("stft: ragged channel lengths");

  const int frames = stft_frame_count(len, cfg);
  SpectrogramTensor spec(cfg, static_cast<int>(waveform.size()), frames,
                         cfg.bins());
  const std::vector<double> win = make_window(cfg);
  Fft fft(cfg.window_len);
  std::vector<double> frame(cfg.window_len);

  for (int c = 0; c < spec.channels; ++c) {
    const auto& x = waveform[c];
    for (int t = 0; t < frames; ++t) {
      const std::size_t start = static_cast<std::size_t>(t) * cfg.hop;
      for (int n = 0; n < cfg.window_len; ++n) {
        const std::size_t idx = start + n;
        frame[n] = idx < len ? win[n] * x[idx] : 0.0;
      }
      auto bins = fft.rfft(frame.data());
      std::copy(bins.begin(), bins.end(), &spec.at(c, t, 0));
    }
  }
  return spec;
}

inline SpectrogramTensor stft(const std::vector<double>& mono,
                              const StftConfig& cfg) {
  return stft(std::vector<std::vector<double>>{mono}, cfg);
}

// Weighted overlap-add synthesis of one channel. The synthesis stage divides
// by the accumulated squared analysis window, clamped below at half of its
// fully-overlapped peak: interior samples get the exact perfect-reconstruction
// normalization, while the partially covered leading/trailing window regions
// fade smoothly instead of dividing by a vanishing window sum. Without the
// clamp, a modified (masked or filtered) spectrogram can place energy in
// those regions that the unclamped division amplifies by orders of magnitude.
inline std::vector<double> istft(const SpectrogramTensor& spec,
                                 const StftConfig& cfg, std::size_t out_len,
                                 int channel = 0) {
  cfg.validate();
  if (!(spec.config == cfg))
    throw FormatError("istft: config does not match the analysis config");
  if (spec.frames <= 0) throw FormatError("istft: empty spectrogram");
  if (channel < 0 || channel >= spec.channels)
    throw FormatError("istft: channel out of range");

  const std::vector<double> win = make_window(cfg);
  Fft fft(cfg.window_len);
  const std::size_t covered =
      static_cast<std::size_t>(spec.frames - 1) * cfg.hop + cfg.window_len;
  std::vector<double> num(covered, 0.0);
  std::vector<double> den(covered, 0.0);
  std::vector<double> frame(cfg.window_len);

  for (int t = 0; t < spec.frames; ++t) {
    fft.irfft(&spec.at(channel, t, 0), frame.data());
    const std::size_t start = static_cast<std::size_t>(t) * cfg.hop;
    for (int n = 0; n < cfg.window_len; ++n) {
      num[start + n] += win[n] * frame[n];
      den[start + n] += win[n] * win[n];
    }
  }

  std::vector<double> out(out_len, 0.0);
  const std::size_t limit = std::min(out_len, covered);
  const double den_peak = *std::max_element(den.begin(), den.end());
  if (den_peak <= 0.0) return out;  // all-zero window sum: nothing to divide
  const double den_floor = 0.5 * den_peak;
  for (std::size_t i = 0; i < limit; ++i) {
    out[i] = num[i] / std::max(den[i], den_floor);
  }
  return out;
}

// Spectrogram <-> tensor-file container (complex64 payload, dims [C, T, F]).
inline void save_spectrogram(const std::string& path,
                             const SpectrogramTensor& spec) {
  std::vector<std::complex<float>> payload(spec.data.size());
  for (std::size_t i = 0; i < spec.data.size(); ++i) {
    payload[i] = {static_cast<float>(spec.data[i].real()),
                  static_cast<float>(spec.data[i].imag())};
  }
  write_tensor(path,
               {static_cast<uint32_t>(spec.channels),
                static_cast<uint32_t>(spec.frames),
                static_cast<uint32_t>(spec.bins)},
               payload);
}

inline SpectrogramTensor load_spectrogram(const std::string& path,
                                          const StftConfig& cfg) {
  TensorData t = read_tensor(path);
  if (t.dtype != TensorDtype::kC64 || t.dims.size() != 3)
    throw FormatError("spectrogram: expected 3-d complex64 tensor: " + path);
  SpectrogramTensor spec(cfg, static_cast<int>(t.dims[0]),
                         static_cast<int>(t.dims[1]),
                         static_cast<int>(t.dims[2]));
  for (std::size_t i = 0; i < t.c64.size(); ++i) {
    spec.data[i] = {t.c64[i].real(), t.c64[i].imag()};
  }
  return spec;
}

}  // namespace distsep
