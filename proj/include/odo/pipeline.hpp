// odo/pipeline.hpp

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

#ifndef ODO_PIPELINE_HPP_
#define ODO_PIPELINE_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "odo/detectors.hpp"
#include "odo/dsp.hpp"
#include "odo/duration_prior.hpp"
#include "odo/hmm.hpp"
#include "odo/metrics.hpp"
#include "odo/odo.hpp"
#include "odo/scene.hpp"

namespace odo {

/// Audio -> band-limited, median-subtracted magnitude spectrogram, and the
/// two feature streams derived from it.
struct FrontEndConfig {
  Index frame_len = 2048;
  Index hop = 1024;
  double band_lo_hz = 500.0;
  double band_hi_hz = 20000.0;
  double median_window_seconds = 10.0;
  bool median_clamp = true;
  Index detector_pool = 1;  // adjacent-bin averaging for detector patches
  Index hmm_pool = 1;       // and for HMM observations
  PatchGeometry detector_geometry{5, 5};
  PatchGeometry hmm_geometry{0, 5};
};

struct FrontEnd {
  Spectrogram<float> spectrogram;  // after band limiting and noise reduction
  MatrixX<float> detector_features;  // one row per frame
  MatrixX<float> hmm_features;
  Index n_frames() const { return spectrogram.n_frames(); }
  double hop_seconds() const { return spectrogram.hop_seconds; }
};

/// Row t of the detector features is the difference patch centred on the
/// change from frame t-1 to frame t.
FrontEnd compute_front_end(const AudioClip &clip, const FrontEndConfig &cfg);

enum class SharpenerSource { in_sample, out_of_bag };

struct TrainConfig {
  FrontEndConfig front_end;
  ForestParams forest;
  /// Negatives kept per positive frame when training the forests; 0 keeps
  /// every frame.
  double negative_ratio = 0.0;
  Index sharpener_window = 11;
  SharpenerSource sharpener_source = SharpenerSource::in_sample;
  Index prior_components = 3;
  double prior_widen = 0.25;
  bool flat_prior = false;  // primary prior is flat instead of a GMM
  MatchConfig match;
  double count_window_seconds = 10.0;
  bool train_hmm = true;
  HmmOptions hmm;
  PairingOrder pairing = PairingOrder::fifo;
  std::uint64_t seed = 1;
};

enum class System { odo, odo_flat, hmm, combined, raw_onset };

inline constexpr System kAllSystems[] = {System::odo, System::odo_flat,
                                         System::hmm, System::combined,
                                         System::raw_onset};

std::string_view system_name(System s);
System parse_system(std::string_view name);
/// raw_onset is a counting system only.
inline bool transcribes(System s) { return s != System::raw_onset; }

struct Calibrations {
  CalibrationFactor odo, odo_flat, hmm, combined, raw_onset;
  CalibrationFactor &operator[](System s);
  const CalibrationFactor &operator[](System s) const;
};

/// Everything needed to run every system on new audio.
struct ModelBundle {
  static constexpr int kVersion = 1;
  int version = kVersion;
  TrainConfig config;
  int sample_rate = 0;
  ForestModel onset_forest, offset_forest;
  SharpenerModel onset_sharpener, offset_sharpener;
  Index negatives_kept = 0;  // training rows used by the forests
  DurationPrior prior;       // GMM unless config.flat_prior
  DurationPrior flat;        // for the flat-prior system
  double threshold = 0.0;
  double flat_threshold = 0.0;
  Calibrations calibration;
  std::optional<HmmModel> hmm;       // plain cardinality model
  std::optional<HmmModel> combined;  // expanded model on augmented features
};

struct TrainSummary {
  Index n_recordings = 0;
  Index n_events = 0;
  Index n_frames = 0;
  int k_max = 0;
};

/// Trains detectors, sharpeners, priors, thresholds, calibrations and the
/// HMMs. All recordings must share one sample rate.
ModelBundle train_bundle(std::span<const LabeledScene> recordings,
                         const TrainConfig &cfg, TrainSummary *summary = nullptr);
/// Same, reusing front ends computed with cfg.front_end.
ModelBundle train_bundle(std::span<const LabeledScene> recordings,
                         std::span<const FrontEnd> front_ends,
                         const TrainConfig &cfg, TrainSummary *summary = nullptr);

/// Detector outputs for one recording, shared by every system.
struct Analysis {
  std::shared_ptr<const FrontEnd> front_end;
  DetectionCurve onset, offset;  // sharpened
  DetectionCurve onset_raw, offset_raw;
  double duration_seconds = 0.0;
};

Analysis analyse(const ModelBundle &bundle, const AudioClip &clip);
Analysis analyse(const ModelBundle &bundle,
                 std::shared_ptr<const FrontEnd> front_end,
                 double duration_seconds);

/// Posterior under the bundle's primary prior, or the flat one.
EventPosterior posterior(const ModelBundle &bundle, const Analysis &analysis,
                         bool flat = false);

/// Transcript of a transcribing system.
Transcript detect(const ModelBundle &bundle, const Analysis &analysis,
                  System system);

/// Calibrated count estimate per window.
std::vector<double> count(const ModelBundle &bundle, const Analysis &analysis,
                          System system, std::span<const CountWindow> windows);

/// Uncalibrated sum of an edge curve over frames whose midpoint lies in each
/// window.
std::vector<double> curve_counts(const DetectionCurve &curve,
                                 std::span<const CountWindow> windows);

}  // namespace odo

#endif  // ODO_PIPELINE_HPP_
