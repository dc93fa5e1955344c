// odo/dsp.hpp

// Copyright 2026  The odo authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ODO_DSP_HPP_
#define ODO_DSP_HPP_

#include <Eigen/Dense>
#include <vector>

namespace odo {

using Eigen::Index;

template <typename Scalar>
using MatrixX =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Single-channel audio. Samples are nominally in [-1, 1].
struct AudioClip {
  std::vector<float> samples;
  int sample_rate = 0;

  double duration_seconds() const {
    return sample_rate > 0 ? double(samples.size()) / sample_rate : 0.0;
  }
};

enum class WindowKind { hann, rectangular };

struct MagnitudeTag {};
struct DifferenceTag {};

/// Frames x bins matrix with its time and frequency axes. The tag keeps
/// magnitude spectrograms and their time differences apart at compile time.
template <typename Scalar, typename Kind>
struct BasicSpectrogram {
  MatrixX<Scalar> values;
  double hop_seconds = 0.0;
  std::vector<double> bin_freqs;  // Hz, strictly ascending

  Index n_frames() const { return values.rows(); }
  Index n_bins() const { return values.cols(); }
};

template <typename Scalar>
using Spectrogram = BasicSpectrogram<Scalar, MagnitudeTag>;
template <typename Scalar>
using DiffSpectrogram = BasicSpectrogram<Scalar, DifferenceTag>;

/// Frames taken around a centre frame: [centre - before, centre + after].
struct PatchGeometry {
  Index before = 5;
  Index after = 5;

  Index n_frames() const { return before + after + 1; }
  Index dimension(Index n_bins) const { return n_frames() * n_bins; }
};

template <typename Scalar>
struct FeatureVector {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
  Index center = 0;
  PatchGeometry geometry;
};

/// Magnitude STFT, bins 0..frame_len/2. Throws Errc::insufficient_samples
/// when the clip is shorter than one frame.
template <typename Scalar>
Spectrogram<Scalar> compute_spectrogram(const AudioClip &clip, Index frame_len,
                                        Index hop,
                                        WindowKind window = WindowKind::hann);

/// Keeps the bins with lo_hz <= f <= hi_hz.
template <typename Scalar>
Spectrogram<Scalar> band_limit(const Spectrogram<Scalar> &spec, double lo_hz,
                               double hi_hz);

/// Subtracts, per band, the median over frames within +-window_seconds/2 of
/// each frame (truncated at the recording edges). With `clamp` the result is
/// floored at zero.
template <typename Scalar>
Spectrogram<Scalar> reduce_noise_median(const Spectrogram<Scalar> &spec,
                                        double window_seconds,
                                        bool clamp = true);

/// out[t] = spec[t + 1] - spec[t].
template <typename Scalar>
DiffSpectrogram<Scalar> time_difference(const Spectrogram<Scalar> &spec);

/// Averages groups of `factor` adjacent bins; a trailing partial group is
/// averaged over its own size.
template <typename Scalar>
Spectrogram<Scalar> pool_bands(const Spectrogram<Scalar> &spec, Index factor);

/// Row-major flattening of the frames around `center`. Frames outside the
/// spectrogram read as zeros.
template <typename Scalar, typename Kind>
FeatureVector<Scalar> extract_patch(const BasicSpectrogram<Scalar, Kind> &spec,
                                    Index center, PatchGeometry geometry) {
  const Index bins = spec.n_bins();
  FeatureVector<Scalar> out;
  out.center = center;
  out.geometry = geometry;
  out.values.setZero(geometry.dimension(bins));
  for (Index k = 0; k < geometry.n_frames(); ++k) {
    const Index frame = center - geometry.before + k;
    if (frame < 0 || frame >= spec.n_frames()) continue;
    out.values.segment(k * bins, bins) = spec.values.row(frame).transpose();
  }
  return out;
}

/// Patches for many centres at once: row r is the patch centred at
/// r + center_offset.
template <typename Scalar, typename Kind>
MatrixX<Scalar> extract_patches(const BasicSpectrogram<Scalar, Kind> &spec,
                                PatchGeometry geometry, Index n_rows,
                                Index center_offset = 0) {
  const Index bins = spec.n_bins();
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(n_rows, geometry.dimension(bins));
  for (Index r = 0; r < n_rows; ++r) {
    for (Index k = 0; k < geometry.n_frames(); ++k) {
      const Index frame = r + center_offset - geometry.before + k;
      if (frame < 0 || frame >= spec.n_frames()) continue;
      out.row(r).segment(k * bins, bins) = spec.values.row(frame);
    }
  }
  return out;
}

}  // namespace odo

#endif  // ODO_DSP_HPP_
