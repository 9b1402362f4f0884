// Copyright 2026 The distsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "distsep/errors.hpp"
#include "distsep/mask.hpp"
#include "distsep/stft.hpp"

namespace distsep {

// Per-frequency mixture and target spatial covariances, M x M Hermitian.
struct CovarianceSet {
  int channels = 0;
  int bins = 0;
  int frame_count = 0;
  std::vector<Eigen::MatrixXcd> r_y;
  std::vector<Eigen::MatrixXcd> r_s;
};

// One complex weight vector per frequency bin plus solve diagnostics.
struct FilterBank {
  int channels = 0;
  int bins = 0;
  int ref_index = 0;
  double loading_used = 0.0;
  std::vector<Eigen::VectorXcd> weights;
  std::vector<int> degenerate_bins;  // bins that fell back to w = e_ref

  nlohmann::json degeneracy_report() const {
    nlohmann::json report;
    report["bins_total"] = bins;
    report["bins_degenerate"] = static_cast<int>(degenerate_bins.size());
    report["degenerate_bin_indices"] = degenerate_bins;
    report["loading"] = loading_used;
    report["ref_index"] = ref_index;
    return report;
  }
};

// Batch covariance estimation over the whole utterance:
//   R_y(f) = (1/T) sum_t y(f,t) y(f,t)^H
//   R_s(f) = (1/T) sum_t (m(t,f) y(f,t)) (m(t,f) y(f,t))^H
// The same scalar mask gain multiplies every channel of a frame (common
// mask), so R_s = (1/T) sum_t m^2 y y^H. Frame summation order is fixed.
inline CovarianceSet estimate_covariances(const SpectrogramTensor& spec,
                                          const TfMask& mask) {
  if (spec.frames <= 0) throw EstimationError("covariances: zero frames");
  if (mask.frames != spec.frames || mask.bins != spec.bins)
    throw FormatError("covariances: mask is " + std::to_string(mask.frames) +
                      "x" + std::to_string(mask.bins) + ", spectrogram is " +
                      std::to_string(spec.frames) + "x" +
                      std::to_string(spec.bins));

  const int m = spec.channels;
  CovarianceSet cov;
  cov.channels = m;
  cov.bins = spec.bins;
  cov.frame_count = spec.frames;
  cov.r_y.assign(spec.bins, Eigen::MatrixXcd::Zero(m, m));
  cov.r_s.assign(spec.bins, Eigen::MatrixXcd::Zero(m, m));

  Eigen::VectorXcd y(m);
  for (int f = 0; f < spec.bins; ++f) {
    Eigen::MatrixXcd& ry = cov.r_y[f];
    Eigen::MatrixXcd& rs = cov.r_s[f];
    for (int t = 0; t < spec.frames; ++t) {
      for (int c = 0; c < m; ++c) y(c) = spec.at(c, t, f);
      const double g = mask.at(t, f);
      ry.noalias() += y * y.adjoint();
      rs.noalias() += (g * g) * (y * y.adjoint());
    }
    const double inv_t = 1.0 / spec.frames;
    ry *= inv_t;
    rs *= inv_t;
  }
  return cov;
}

// Closed-form per-frequency Wiener solve:
//   (R_y + delta * tr(R_y)/M * I) w = R_s e_ref
// A zero right-hand side yields w = 0 exactly (no target present). Bins whose
// solve is non-finite or leaves a relative residual above `residual_tol` fall
// back to the reference selector e_ref and are listed as degenerate.
inline FilterBank compute_mwf(const CovarianceSet& cov, int ref_index,
                              double loading = 1e-9,
                              double residual_tol = 1e-8) {
  if (ref_index < 0 || ref_index >= cov.channels)
    throw ConfigError("mwf: ref_index out of range");
  if (loading < 0.0) throw ConfigError("mwf: loading must be >= 0");

  const int m = cov.channels;
  FilterBank fb;
  fb.channels = m;
  fb.bins = cov.bins;
  fb.ref_index = ref_index;
  fb.loading_used = loading;
  fb.weights.assign(cov.bins, Eigen::VectorXcd::Zero(m));

  Eigen::VectorXcd e_ref = Eigen::VectorXcd::Zero(m);
  e_ref(ref_index) = 1.0;

  for (int f = 0; f < cov.bins; ++f) {
    const Eigen::VectorXcd rhs = cov.r_s[f].col(ref_index);
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) {
      // R_s e_ref = 0: no target energy reaches the reference channel, the
      // minimizer is the zero filter.
      continue;
    }
    const double delta = loading * cov.r_y[f].trace().real() / m;
    Eigen::MatrixXcd a = cov.r_y[f];
    a.diagonal().array() += delta;
    Eigen::VectorXcd w = a.ldlt().solve(rhs);

    const bool finite = w.allFinite();
    const double residual = finite ? (a * w - rhs).norm() / rhs_norm
                                   : std::numeric_limits<double>::infinity();
    if (!finite || residual > residual_tol) {
      fb.weights[f] = e_ref;
      fb.degenerate_bins.push_back(f);
    } else {
      fb.weights[f] = w;
    }
  }
  return fb;
}

// out(f,t) = w(f)^H y(f,t). Channel accumulation runs in ascending channel
// order so results do not depend on any parallel schedule upstream.
inline SpectrogramTensor apply_filterbank(const FilterBank& fb,
                                          const SpectrogramTensor& spec) {
  if (fb.channels != spec.channels)
    throw FormatError("apply_filterbank: filter has " +
                      std::to_string(fb.channels) + " channels, tensor has " +
                      std::to_string(spec.channels));
  if (fb.bins != spec.bins)
    throw FormatError("apply_filterbank: bin count mismatch");

  SpectrogramTensor out(spec.config, 1, spec.frames, spec.bins);
  out.channel_labels[0] = "filtered";
  for (int f = 0; f < spec.bins; ++f) {
    const Eigen::VectorXcd& w = fb.weights[f];
    for (int t = 0; t < spec.frames; ++t) {
      std::complex<double> acc = 0.0;
      for (int c = 0; c < spec.channels; ++c)
        acc += std::conj(w(c)) * spec.at(c, t, f);
      out.at(0, t, f) = acc;
    }
  }
  return out;
}

}  // namespace distsep
