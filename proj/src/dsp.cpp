// odo/src/dsp.cpp

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

#include "odo/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

#include "odo/error.hpp"

namespace odo {

namespace {

template <typename Scalar>
std::vector<Scalar> make_window(Index n, WindowKind kind) {
  std::vector<Scalar> w(n, Scalar(1));
  if (kind == WindowKind::hann) {
    // Periodic Hann, the usual choice for overlapped analysis.
    for (Index i = 0; i < n; ++i)
      w[i] = Scalar(0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n));
  }
  return w;
}

// Median of every centred window of half-width `half`, truncated at the
// edges. Keeps the window contents in a sorted buffer.
template <typename Scalar>
void sliding_median(const std::vector<Scalar> &x, Index half,
                    std::vector<Scalar> *out) {
  const Index n = static_cast<Index>(x.size());
  out->resize(n);
  std::vector<Scalar> window;
  window.reserve(std::min<Index>(n, 2 * half + 1));
  Index lo = 0, hi = -1;
  for (Index t = 0; t < n; ++t) {
    const Index new_lo = std::max<Index>(0, t - half);
    const Index new_hi = std::min<Index>(n - 1, t + half);
    while (hi < new_hi) {
      const Scalar v = x[++hi];
      window.insert(std::upper_bound(window.begin(), window.end(), v), v);
    }
    while (lo < new_lo) {
      const Scalar v = x[lo++];
      window.erase(std::lower_bound(window.begin(), window.end(), v));
    }
    const std::size_t m = window.size();
    (*out)[t] = (m % 2 == 1)
                    ? window[m / 2]
                    : Scalar(0.5) * (window[m / 2 - 1] + window[m / 2]);
  }
}

}  // namespace

template <typename Scalar>
Spectrogram<Scalar> compute_spectrogram(const AudioClip &clip, Index frame_len,
                                        Index hop, WindowKind window) {
  if (clip.sample_rate <= 0)
    throw Error(Errc::invalid_argument, "sample rate must be positive");
  if (frame_len < 2 || frame_len % 2 != 0)
    throw Error(Errc::invalid_argument, "frame length must be even and >= 2");
  if (hop <= 0 || frame_len % hop != 0)
    throw Error(Errc::invalid_argument, "hop must divide the frame length");
  const Index len = static_cast<Index>(clip.samples.size());
  if (len < frame_len)
    throw Error(Errc::insufficient_samples,
                "insufficient samples: clip has " + std::to_string(len) +
                    ", one frame needs " + std::to_string(frame_len));

  const Index n_frames = (len - frame_len) / hop + 1;
  const Index n_bins = frame_len / 2 + 1;
  Spectrogram<Scalar> spec;
  spec.values.resize(n_frames, n_bins);
  spec.hop_seconds = double(hop) / clip.sample_rate;
  spec.bin_freqs.resize(n_bins);
  for (Index k = 0; k < n_bins; ++k)
    spec.bin_freqs[k] = double(k) * clip.sample_rate / double(frame_len);

  const auto w = make_window<Scalar>(frame_len, window);
  Eigen::FFT<Scalar> fft;
  fft.SetFlag(Eigen::FFT<Scalar>::HalfSpectrum);
  std::vector<Scalar> frame(frame_len);
  std::vector<std::complex<Scalar>> bins;
  for (Index t = 0; t < n_frames; ++t) {
    const float *src = clip.samples.data() + t * hop;
    for (Index i = 0; i < frame_len; ++i) frame[i] = Scalar(src[i]) * w[i];
    fft.fwd(bins, frame);
    for (Index k = 0; k < n_bins; ++k)
      spec.values(t, k) = std::sqrt(std::norm(bins[k]));
  }
  return spec;
}

template <typename Scalar>
Spectrogram<Scalar> band_limit(const Spectrogram<Scalar> &spec, double lo_hz,
                               double hi_hz) {
  if (!(lo_hz < hi_hz))
    throw Error(Errc::invalid_argument, "band_limit: lo_hz must be < hi_hz");
  Index first = -1, last = -2;
  for (Index k = 0; k < spec.n_bins(); ++k) {
    const double f = spec.bin_freqs[k];
    if (f >= lo_hz && f <= hi_hz) {
      if (first < 0) first = k;
      last = k;
    }
  }
  if (first < 0)
    throw Error(Errc::invalid_argument,
                "band_limit: no bins inside [" + std::to_string(lo_hz) + ", " +
                    std::to_string(hi_hz) + "] Hz");
  const Index count = last - first + 1;
  Spectrogram<Scalar> out;
  out.values = spec.values.middleCols(first, count);
  out.hop_seconds = spec.hop_seconds;
  out.bin_freqs.assign(spec.bin_freqs.begin() + first,
                       spec.bin_freqs.begin() + first + count);
  return out;
}

template <typename Scalar>
Spectrogram<Scalar> reduce_noise_median(const Spectrogram<Scalar> &spec,
                                        double window_seconds, bool clamp) {
  if (!(window_seconds > 0.0))
    throw Error(Errc::invalid_argument, "median window must be positive");
  const Index half =
      static_cast<Index>(std::floor(0.5 * window_seconds / spec.hop_seconds + 1e-9));
  Spectrogram<Scalar> out = spec;
  std::vector<Scalar> band(spec.n_frames()), median;
  for (Index b = 0; b < spec.n_bins(); ++b) {
    for (Index t = 0; t < spec.n_frames(); ++t) band[t] = spec.values(t, b);
    sliding_median(band, half, &median);
    for (Index t = 0; t < spec.n_frames(); ++t) {
      const Scalar v = band[t] - median[t];
      out.values(t, b) = clamp ? std::max(Scalar(0), v) : v;
    }
  }
  return out;
}

template <typename Scalar>
DiffSpectrogram<Scalar> time_difference(const Spectrogram<Scalar> &spec) {
  if (spec.n_frames() < 2)
    throw Error(Errc::insufficient_samples,
                "time_difference needs at least two frames");
  DiffSpectrogram<Scalar> out;
  const Index n = spec.n_frames() - 1;
  out.values = spec.values.bottomRows(n) - spec.values.topRows(n);
  out.hop_seconds = spec.hop_seconds;
  out.bin_freqs = spec.bin_freqs;
  return out;
}

template <typename Scalar>
Spectrogram<Scalar> pool_bands(const Spectrogram<Scalar> &spec, Index factor) {
  if (factor < 1)
    throw Error(Errc::invalid_argument, "pooling factor must be >= 1");
  if (factor == 1) return spec;
  const Index groups = (spec.n_bins() + factor - 1) / factor;
  Spectrogram<Scalar> out;
  out.hop_seconds = spec.hop_seconds;
  out.values.resize(spec.n_frames(), groups);
  out.bin_freqs.resize(groups);
  for (Index g = 0; g < groups; ++g) {
    const Index first = g * factor;
    const Index count = std::min(factor, spec.n_bins() - first);
    out.values.col(g) =
        spec.values.middleCols(first, count).rowwise().sum() / Scalar(count);
    double f = 0.0;
    for (Index k = first; k < first + count; ++k) f += spec.bin_freqs[k];
    out.bin_freqs[g] = f / count;
  }
  return out;
}

#define ODO_INSTANTIATE_DSP(Scalar)                                          \
  template Spectrogram<Scalar> compute_spectrogram<Scalar>(                  \
      const AudioClip &, Index, Index, WindowKind);                          \
  template Spectrogram<Scalar> band_limit<Scalar>(const Spectrogram<Scalar> &, \
                                                  double, double);           \
  template Spectrogram<Scalar> reduce_noise_median<Scalar>(                  \
      const Spectrogram<Scalar> &, double, bool);                            \
  template DiffSpectrogram<Scalar> time_difference<Scalar>(                  \
      const Spectrogram<Scalar> &);                                          \
  template Spectrogram<Scalar> pool_bands<Scalar>(const Spectrogram<Scalar> &, \
                                                  Index);

ODO_INSTANTIATE_DSP(float)
ODO_INSTANTIATE_DSP(double)

#undef ODO_INSTANTIATE_DSP

}  // namespace odo
