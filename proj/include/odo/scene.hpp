// odo/scene.hpp

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

#ifndef ODO_SCENE_HPP_
#define ODO_SCENE_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "odo/dsp.hpp"
#include "odo/transcript.hpp"

namespace odo {

enum class NoiseKind { white, pink };

/// Synthetic polyphonic scene: Poisson call onsets, log-normal call
/// durations, FM glide calls over Gaussian background noise.
struct SceneConfig {
  double duration_seconds = 600.0;
  double rate_per_minute = 40.0;
  double duration_median_seconds = 0.10;
  double duration_sigma = 0.3;
  double min_call_seconds = 0.02;
  double max_call_seconds = 0.5;
  double call_band_lo_hz = 2000.0;
  double call_band_hi_hz = 7000.0;
  double snr_db = 20.0;  // call peak vs noise RMS; +inf disables noise
  NoiseKind noise_kind = NoiseKind::white;
  int sample_rate = 96000;
  /// When positive, no call crosses a multiple of this many seconds, so the
  /// scene splits into segments with exact ground truth.
  double segment_seconds = 0.0;
  /// Calls end at least this long before the end of the scene (or segment).
  double edge_margin_seconds = 0.05;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Parameters of one rendered call.
struct CallSpec {
  double onset_seconds = 0.0;
  double duration_seconds = 0.0;
  double f0_hz = 0.0;
  double phase = 0.0;
};

struct LabeledScene {
  AudioClip audio;
  Transcript truth;
  std::vector<CallSpec> calls;
};

/// FM tone gliding from f0 down to 0.9 f0 under a raised-cosine envelope
/// with 5 ms attack and release, normalised to unit peak.
std::vector<float> synth_call(double duration_seconds, double f0_hz,
                              int sample_rate, double phase = 0.0);

/// Adds every call into `out` (resized to at least the covered length).
void render_calls(std::span<const CallSpec> calls, int sample_rate,
                  std::vector<float> *out);

LabeledScene generate_scene(const SceneConfig &cfg);

/// Sample-wise sum of the segments (shorter ones zero-padded), rescaled to
/// the given peak, with the union of their transcripts. A non-positive peak
/// keeps the plain sum.
LabeledScene fold_scene(std::span<const LabeledScene> segments,
                        double peak = 0.9);

/// Cuts a scene into `n` equal consecutive segments; events go with the
/// segment holding their onset.
std::vector<LabeledScene> split_scene(const LabeledScene &scene, Index n);

/// The density-folding construction: split into `n` segments, superimpose.
LabeledScene fold_dense(const LabeledScene &scene, Index n = 3);

}  // namespace odo

#endif  // ODO_SCENE_HPP_
