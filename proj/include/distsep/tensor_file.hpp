// Copyright 2026 The distsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "distsep/errors.hpp"

namespace distsep {

// Minimal binary tensor container shared by masks, spectrograms, filters and
// covariance dumps.
//
// Layout (all integers little-endian u32):
//   bytes 0..7   magic "DSTNSR01"
//   dtype        1 = f32, 2 = f64, 3 = complex64 (f32 pairs)
//   ndim
//   dims[ndim]
//   payload, row-major
//
// Round trips are bit-exact: the payload is written and read as raw IEEE-754.

enum class TensorDtype : uint32_t { kF32 = 1, kF64 = 2, kC64 = 3 };

struct TensorData {
  TensorDtype dtype = TensorDtype::kF32;
  std::vector<uint32_t> dims;
  std::vector<float> f32;
  std::vector<std::complex<float>> c64;
  std::vector<double> f64;

  std::size_t element_count() const {
    std::size_t n = 1;
    for (uint32_t d : dims) n *= d;
    return dims.empty() ? 0 : n;
  }
};

namespace detail {

constexpr char kTensorMagic[8] = {'D', 'S', 'T', 'N', 'S', 'R', '0', '1'};

inline void tensor_write_u32(std::ostream& out, uint32_t v) {
  char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
               char((v >> 24) & 0xff)};
  out.write(b, 4);
}

inline uint32_t tensor_read_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw FormatError("tensor: truncated header: " + path);
  return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 |
         uint32_t(b[3]) << 24;
}

inline void write_tensor_raw(const std::string& path, TensorDtype dtype,
                             const std::vector<uint32_t>& dims,
                             std::size_t n_elements, const void* payload,
                             std::size_t payload_bytes) {
  std::size_t expected = dims.empty() ? 0 : 1;
  for (uint32_t d : dims) expected *= d;
  if (expected != n_elements)
    throw FormatError("tensor: dims describe " + std::to_string(expected) +
                      " elements but payload has " +
                      std::to_string(n_elements) + ": " + path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("tensor: cannot write " + path);
  out.write(kTensorMagic, 8);
  tensor_write_u32(out, static_cast<uint32_t>(dtype));
  tensor_write_u32(out, static_cast<uint32_t>(dims.size()));
  for (uint32_t d : dims) tensor_write_u32(out, d);
  out.write(static_cast<const char*>(payload),
            static_cast<std::streamsize>(payload_bytes));
  if (!out) throw IoError("tensor: write failed: " + path);
}

}  // namespace detail

inline void write_tensor(const std::string& path,
                         const std::vector<uint32_t>& dims,
                         const std::vector<float>& data) {
  detail::write_tensor_raw(path, TensorDtype::kF32, dims, data.size(),
                           data.data(), data.size() * sizeof(float));
}

inline void write_tensor(const std::string& path,
                         const std::vector<uint32_t>& dims,
                         const std::vector<double>& data) {
  detail::write_tensor_raw(path, TensorDtype::kF64, dims, data.size(),
                           data.data(), data.size() * sizeof(double));
}

inline void write_tensor(const std::string& path,
                         const std::vector<uint32_t>& dims,
                         const std::vector<std::complex<float>>& data) {
  detail::write_tensor_raw(path, TensorDtype::kC64, dims, data.size(),
                           data.data(),
                           data.size() * sizeof(std::complex<float>));
}

inline TensorData read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("tensor: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, detail::kTensorMagic, 8) != 0)
    throw FormatError("tensor: bad magic: " + path);

  TensorData t;
  uint32_t dtype = detail::tensor_read_u32(in, path);
  if (dtype < 1 || dtype > 3)
    throw FormatError("tensor: unknown dtype code " + std::to_string(dtype) +
                      ": " + path);
  t.dtype = static_cast<TensorDtype>(dtype);
  uint32_t ndim = detail::tensor_read_u32(in, path);
  if (ndim > 8) throw FormatError("tensor: implausible ndim: " + path);
  t.dims.resize(ndim);
  for (uint32_t i = 0; i < ndim; ++i)
    t.dims[i] = detail::tensor_read_u32(in, path);

  const std::size_t count = t.element_count();
  auto read_payload = [&](void* dst, std::size_t bytes) {
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
    if (!in) throw FormatError("tensor: truncated payload: " + path);
  };
  switch (t.dtype) {
    case TensorDtype::kF32:
      t.f32.resize(count);
      read_payload(t.f32.data(), count * sizeof(float));
      break;
    case TensorDtype::kF64:
      t.f64.resize(count);
      read_payload(t.f64.data(), count * sizeof(double));
      break;
    case TensorDtype::kC64:
      t.c64.resize(count);
      read_payload(t.c64.data(), count * sizeof(std::complex<float>));
      break;
  }
  return t;
}

}  // namespace distsep
