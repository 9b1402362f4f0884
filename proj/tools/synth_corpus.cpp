// Copyright 2026 The distsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Generates a small corpus of synthetic speech-like WAV files, for running
// the pipeline without external speech data.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "distsep/synth.hpp"
#include "distsep/wav.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic speech-like corpus generator"};
  std::string out_dir;
  int count = 8;
  uint64_t seed = 1;
  double duration_s = 12.0;
  int sample_rate_hz = 16000;
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--count", count, "Number of files (default 8)");
  app.add_option("--seed", seed, "Base seed (default 1)");
  app.add_option("--duration", duration_s, "Seconds per file (default 12)");
  app.add_option("--sample-rate", sample_rate_hz, "Sample rate (default 16000)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::filesystem::create_directories(out_dir);
    const auto n_samples =
        static_cast<std::size_t>(duration_s * sample_rate_hz + 0.5);
    for (int i = 0; i < count; ++i) {
      distsep::AudioBuffer buf;
      buf.sample_rate_hz = sample_rate_hz;
      buf.channels.push_back(distsep::make_speech_like(
          distsep::splitmix64(seed + i), n_samples, sample_rate_hz));
      char name[32];
      std::snprintf(name, sizeof(name), "/talker_%03d.wav", i);
      distsep::write_wav(out_dir + name, buf);
    }
  } catch (const distsep::Error& e) {
    std::cerr << "synth-corpus: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
