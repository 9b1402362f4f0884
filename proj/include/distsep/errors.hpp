// Copyright 2026 The distsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <stdexcept>
#include <string>

namespace distsep {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent data: bad file headers, shape mismatches,
// sample-rate disagreements.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Caller-supplied configuration that cannot be honored.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Data that parsed fine but violates a value contract (e.g. mask > 1).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Scene sampling could not satisfy a geometric constraint.
class SamplingError : public Error {
 public:
  using Error::Error;
};

// Requested reverberation time is physically unreachable for the room.
class AcousticsError : public Error {
 public:
  using Error::Error;
};

// Covariance estimation failed (e.g. zero frames).
class EstimationError : public Error {
 public:
  using Error::Error;
};

// Protocol-level failure in the node exchange (missing sender, etc).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Mask provider could not produce a mask.
class ProviderError : public Error {
 public:
  using Error::Error;
};

// Metric computation rejected its inputs (zero reference, ...).
class MetricError : public Error {
 public:
  using Error::Error;
};

// Scene scoring failed (missing reference image, ...).
class EvalError : public Error {
 public:
  using Error::Error;
};

// Aggregation over an empty group.
class AggregationError : public Error {
 public:
  using Error::Error;
};

// Filesystem-level failure; message carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace distsep
