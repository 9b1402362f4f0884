// Copyright 2026 The distsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "distsep/errors.hpp"

namespace distsep {

// Deinterleaved multichannel audio. channels[c][t] in nominal [-1, 1] range
// (not enforced; float WAVs round-trip arbitrary values).
struct AudioBuffer {
  int sample_rate_hz = 0;
  std::vector<std::vector<double>> channels;

  std::size_t frames() const {
    return channels.empty() ? 0 : channels[0].size();
  }
};

namespace detail {

inline uint32_t read_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw FormatError("wav: truncated file: " + path);
  return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 |
         uint32_t(b[3]) << 24;
}

inline uint16_t read_u16(std::istream& in, const std::string& path) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  if (!in) throw FormatError("wav: truncated file: " + path);
  return uint16_t(b[0]) | uint16_t(b[1]) << 8;
}

inline void write_u32(std::ostream& out, uint32_t v) {
  char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
               char((v >> 24) & 0xff)};
  out.write(b, 4);
}

inline void write_u16(std::ostream& out, uint16_t v) {
  char b[2] = {char(v & 0xff), char((v >> 8) & 0xff)};
  out.write(b, 2);
}

}  // namespace detail

// Reads a RIFF/WAVE file. Supported encodings: PCM 16/24/32-bit integer and
// IEEE float 32/64-bit. Unknown chunks are skipped.
inline AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("wav: cannot open " + path);

  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0)
    throw FormatError("wav: not a RIFF file: " + path);
  detail::read_u32(in, path);  // riff size, unused
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0)
    throw FormatError("wav: not a WAVE file: " + path);

  uint16_t format = 0, num_channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  bool have_fmt = false;
  std::vector<char> payload;

  while (in.read(tag, 4)) {
    uint32_t chunk_size = detail::read_u32(in, path);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      format = detail::read_u16(in, path);
      num_channels = detail::read_u16(in, path);
      sample_rate = detail::read_u32(in, path);
      detail::read_u32(in, path);  // byte rate
      detail::read_u16(in, path);  // block align
      bits = detail::read_u16(in, path);
      if (chunk_size > 16) in.seekg(chunk_size - 16, std::ios::cur);
      if (format == 0xFFFE) {
        // WAVE_FORMAT_EXTENSIBLE carries the real format in the extension;
        // the two supported subformats start with the same 16-bit code, which
        // sits 8 bytes into the extension we just skipped. Re-read it.
        in.seekg(-int(chunk_size - 16) + 8, std::ios::cur);
        format = detail::read_u16(in, path);
        in.seekg(chunk_size - 16 - 10, std::ios::cur);
      }
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      payload.resize(chunk_size);
      in.read(payload.data(), chunk_size);
      if (!in) throw FormatError("wav: truncated data chunk: " + path);
      break;
    } else {
      in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
  }
  if (!have_fmt) throw FormatError("wav: missing fmt chunk: " + path);
  if (num_channels == 0) throw FormatError("wav: zero channels: " + path);

  const bool is_float = format == 3;
  const bool is_pcm = format == 1;
  if (!is_float && !is_pcm)
    throw FormatError("wav: unsupported format code " + std::to_string(format) +
                      ": " + path);

  const std::size_t bytes_per_sample = bits / 8;
  if ((is_pcm && bits != 16 && bits != 24 && bits != 32) ||
      (is_float && bits != 32 && bits != 64)) {
    throw FormatError("wav: unsupported bit depth " + std::to_string(bits) +
                      ": " + path);
  }
  const std::size_t total = payload.size() / (bytes_per_sample * num_channels);

  AudioBuffer buf;
  buf.sample_rate_hz = static_cast<int>(sample_rate);
  buf.channels.assign(num_channels, std::vector<double>(total));
  const char* p = payload.data();
  for (std::size_t t = 0; t < total; ++t) {
    for (int c = 0; c < num_channels; ++c) {
      double v = 0.0;
      if (is_float && bits == 32) {
        float f;
        std::memcpy(&f, p, 4);
        v = f;
      } else if (is_float && bits == 64) {
        double d;
        std::memcpy(&d, p, 8);
        v = d;
      } else if (bits == 16) {
        int16_t s;
        std::memcpy(&s, p, 2);
        v = s / 32768.0;
      } else if (bits == 24) {
        int32_t s = (uint8_t(p[0])) | (uint8_t(p[1]) << 8) | (int8_t(p[2]) << 16);
        v = s / 8388608.0;
      } else {  // pcm 32
        int32_t s;
        std::memcpy(&s, p, 4);
        v = s / 2147483648.0;
      }
      buf.channels[c][t] = v;
      p += bytes_per_sample;
    }
  }
  return buf;
}

// Writes a 32-bit float WAV. All channels must have equal length.
inline void write_wav(const std::string& path, const AudioBuffer& buf) {
  if (buf.channels.empty()) throw FormatError("wav: nothing to write: " + path);
  const std::size_t frames = buf.channels[0].size();
  for (const auto& ch : buf.channels) {
    if (ch.size() != frames)
      throw FormatError("wav: ragged channel lengths: " + path);
  }
  const uint32_t num_channels = static_cast<uint32_t>(buf.channels.size());
  const uint32_t data_bytes = static_cast<uint32_t>(frames * num_channels * 4);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("wav: cannot write " + path);
  out.write("RIFF", 4);
  detail::write_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  detail::write_u32(out, 16);
  detail::write_u16(out, 3);  // IEEE float
  detail::write_u16(out, static_cast<uint16_t>(num_channels));
  detail::write_u32(out, static_cast<uint32_t>(buf.sample_rate_hz));
  detail::write_u32(out, static_cast<uint32_t>(buf.sample_rate_hz) *
                             num_channels * 4);
  detail::write_u16(out, static_cast<uint16_t>(num_channels * 4));
  detail::write_u16(out, 32);
  out.write("data", 4);
  detail::write_u32(out, data_bytes);
  for (std::size_t t = 0; t < frames; ++t) {
    for (uint32_t c = 0; c < num_channels; ++c) {
      float f = static_cast<float>(buf.channels[c][t]);
      char b[4];
      std::memcpy(b, &f, 4);
      out.write(b, 4);
    }
  }
  if (!out) throw IoError("wav: write failed: " + path);
}

}  // namespace distsep
