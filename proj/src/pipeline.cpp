// odo/src/pipeline.cpp

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

#include "odo/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "odo/error.hpp"

namespace odo {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<double> truth_counts(const Transcript &truth,
                                 std::span<const CountWindow> windows) {
  return count_onsets(truth, windows);
}

// Calibration that falls back to 1 when the system produced nothing to
// scale, so one silent system does not abort training.
CalibrationFactor calibrate(std::string_view system,
                            std::span<const double> estimates,
                            std::span<const double> truths) {
  try {
    return fit_calibration(estimates, truths);
  } catch (const Error &e) {
    warn("calibration of " + std::string(system) + " left at 1: " + e.what());
    return {};
  }
}

void append(std::vector<double> *dst, const std::vector<double> &src) {
  dst->insert(dst->end(), src.begin(), src.end());
}

}  // namespace

std::string_view system_name(System s) {
  switch (s) {
    case System::odo: return "odo";
    case System::odo_flat: return "odo_flat";
    case System::hmm: return "hmm";
    case System::combined: return "combined";
    case System::raw_onset: return "raw_onset";
  }
  return "?";
}

System parse_system(std::string_view name) {
  for (System s : kAllSystems)
    if (system_name(s) == name) return s;
  if (name == "odo-flat") return System::odo_flat;
  if (name == "raw-onset") return System::raw_onset;
  if (name == "odo+hmm") return System::combined;
  throw Error(Errc::invalid_argument, "unknown system '" + std::string(name) +
                                          "' (odo, odo_flat, hmm, combined, raw_onset)");
}

CalibrationFactor &Calibrations::operator[](System s) {
  switch (s) {
    case System::odo: return odo;
    case System::odo_flat: return odo_flat;
    case System::hmm: return hmm;
    case System::combined: return combined;
    case System::raw_onset: return raw_onset;
  }
  return odo;
}

const CalibrationFactor &Calibrations::operator[](System s) const {
  return const_cast<Calibrations &>(*this)[s];
}

FrontEnd compute_front_end(const AudioClip &clip, const FrontEndConfig &cfg) {
  if (cfg.detector_pool < 1 || cfg.hmm_pool < 1)
    throw Error(Errc::invalid_argument, "pooling factors must be >= 1");
  FrontEnd fe;
  auto spec = compute_spectrogram<float>(clip, cfg.frame_len, cfg.hop);
  spec = band_limit(spec, cfg.band_lo_hz, cfg.band_hi_hz);
  fe.spectrogram =
      reduce_noise_median(spec, cfg.median_window_seconds, cfg.median_clamp);
  const Index n = fe.n_frames();
  if (n < 2)
    throw Error(Errc::insufficient_samples,
                "front end: need at least two analysis frames");
  {
    const auto pooled = cfg.detector_pool > 1
                            ? pool_bands(fe.spectrogram, cfg.detector_pool)
                            : fe.spectrogram;
    const auto diff = time_difference(pooled);
    fe.detector_features = extract_patches(diff, cfg.detector_geometry, n, -1);
  }
  {
    const auto pooled = cfg.hmm_pool > 1 ? pool_bands(fe.spectrogram, cfg.hmm_pool)
                                         : fe.spectrogram;
    fe.hmm_features = extract_patches(pooled, cfg.hmm_geometry, n, 0);
  }
  return fe;
}

std::vector<double> curve_counts(const DetectionCurve &curve,
                                 std::span<const CountWindow> windows) {
  std::vector<double> out(windows.size(), 0.0);
  for (std::size_t w = 0; w < windows.size(); ++w) {
    for (Index t = 0; t < curve.size(); ++t) {
      const double mid = frame_midpoint(t, curve.hop_seconds);
      if (mid >= windows[w].start_seconds && mid < windows[w].end_seconds)
        out[w] += curve.probs[t];
    }
  }
  return out;
}

ModelBundle train_bundle(std::span<const LabeledScene> recordings,
                         const TrainConfig &cfg, TrainSummary *summary) {
  std::vector<FrontEnd> fronts;
  fronts.reserve(recordings.size());
  for (const auto &r : recordings)
    fronts.push_back(compute_front_end(r.audio, cfg.front_end));
  return train_bundle(recordings, fronts, cfg, summary);
}

ModelBundle train_bundle(std::span<const LabeledScene> recordings,
                         std::span<const FrontEnd> fronts,
                         const TrainConfig &cfg, TrainSummary *summary) {
  if (recordings.size() != fronts.size())
    throw Error(Errc::dimension_mismatch, "train: one front end per recording");
  if (recordings.empty())
    throw Error(Errc::invalid_argument, "train: no labelled recordings");
  const int rate = recordings.front().audio.sample_rate;
  for (const auto &r : recordings)
    if (r.audio.sample_rate != rate)
      throw Error(Errc::invalid_argument,
                  "train: inconsistent sample rates (" + std::to_string(rate) +
                      " vs " + std::to_string(r.audio.sample_rate) + " Hz)");

  ModelBundle bundle;
  bundle.config = cfg;
  bundle.sample_rate = rate;
  const std::size_t n_rec = recordings.size();

  std::vector<FrameLabels> labels;
  Index total_frames = 0;
  for (std::size_t r = 0; r < n_rec; ++r) {
    labels.push_back(labels_from_transcript(recordings[r].truth, fronts[r].n_frames(),
                                            fronts[r].hop_seconds()));
    total_frames += fronts[r].n_frames();
  }
  const double hop = fronts.front().hop_seconds();

  // Forest training rows: every edge frame plus a seeded sample of the rest.
  std::vector<std::vector<Index>> rows(n_rec);
  Index n_rows = 0;
  for (std::size_t r = 0; r < n_rec; ++r) {
    const auto &lab = labels[r];
    std::vector<Index> pos, neg;
    for (Index t = 0; t < lab.onset_flags.size(); ++t)
      (lab.onset_flags[t] > 0 || lab.offset_flags[t] > 0 ? pos : neg).push_back(t);
    if (cfg.negative_ratio > 0.0) {
      const auto keep = std::min<std::size_t>(
          neg.size(), static_cast<std::size_t>(
                          std::ceil(cfg.negative_ratio * double(pos.size()))));
      std::mt19937_64 rng(derive_seed(cfg.seed, 100 + r));
      std::shuffle(neg.begin(), neg.end(), rng);
      neg.resize(keep);
    }
    rows[r] = pos;
    rows[r].insert(rows[r].end(), neg.begin(), neg.end());
    std::sort(rows[r].begin(), rows[r].end());
    n_rows += static_cast<Index>(rows[r].size());
  }
  const Index dim = fronts.front().detector_features.cols();
  MatrixX<float> x(n_rows, dim);
  Eigen::VectorXd y_on(n_rows), y_off(n_rows);
  {
    Index i = 0;
    for (std::size_t r = 0; r < n_rec; ++r)
      for (Index t : rows[r]) {
        x.row(i) = fronts[r].detector_features.row(t);
        y_on[i] = labels[r].onset_flags[t];
        y_off[i] = labels[r].offset_flags[t];
        ++i;
      }
  }
  bundle.negatives_kept = n_rows;
  const bool oob = cfg.sharpener_source == SharpenerSource::out_of_bag;
  Eigen::VectorXd oob_on, oob_off;
  bundle.onset_forest = train_forest(x, y_on, derive_seed(cfg.seed, 1), cfg.forest,
                                     oob ? &oob_on : nullptr);
  bundle.offset_forest = train_forest(x, y_off, derive_seed(cfg.seed, 2), cfg.forest,
                                      oob ? &oob_off : nullptr);
  x.resize(0, 0);

  // Raw curves over every frame; training rows optionally replaced by their
  // out-of-bag predictions.
  std::vector<DetectionCurve> raw_on, raw_off;
  std::vector<Eigen::VectorXd> lab_on, lab_off;
  {
    Index i = 0;
    for (std::size_t r = 0; r < n_rec; ++r) {
      raw_on.push_back(predict_raw(bundle.onset_forest, fronts[r].detector_features,
                                   hop, EdgeKind::onset));
      raw_off.push_back(predict_raw(bundle.offset_forest, fronts[r].detector_features,
                                    hop, EdgeKind::offset));
      for (Index t : rows[r]) {
        if (oob) {
          raw_on.back().probs[t] = oob_on[i];
          raw_off.back().probs[t] = oob_off[i];
        }
        ++i;
      }
      lab_on.push_back(labels[r].onset_flags);
      lab_off.push_back(labels[r].offset_flags);
    }
  }
  bundle.onset_sharpener = train_sharpener(raw_on, lab_on, cfg.sharpener_window);
  bundle.offset_sharpener = train_sharpener(raw_off, lab_off, cfg.sharpener_window);
  std::vector<DetectionCurve> on, off;
  for (std::size_t r = 0; r < n_rec; ++r) {
    on.push_back(sharpen(bundle.onset_sharpener, raw_on[r]));
    off.push_back(sharpen(bundle.offset_sharpener, raw_off[r]));
  }

  std::vector<double> durations;
  for (const auto &r : recordings)
    for (const Event &e : r.truth.events) durations.push_back(e.duration_seconds);
  const auto [tau_min, tau_max] = duration_range_frames(durations, hop, cfg.prior_widen);
  bundle.flat = flat_prior(tau_min, tau_max, hop);
  bundle.prior = cfg.flat_prior
                     ? bundle.flat
                     : fit_duration_gmm(durations, cfg.prior_components,
                                        derive_seed(cfg.seed, 3), hop, tau_min,
                                        tau_max);

  std::vector<Transcript> truths;
  std::vector<std::vector<CountWindow>> windows;
  std::vector<double> truth_total;
  for (std::size_t r = 0; r < n_rec; ++r) {
    truths.push_back(recordings[r].truth);
    windows.push_back(count_windows(recordings[r].audio.duration_seconds(),
                                    cfg.count_window_seconds));
    append(&truth_total, truth_counts(recordings[r].truth, windows.back()));
  }

  for (bool flat : {false, true}) {
    const DurationPrior &prior = flat ? bundle.flat : bundle.prior;
    std::vector<EventPosterior> posts;
    std::vector<double> estimates;
    for (std::size_t r = 0; r < n_rec; ++r) {
      posts.push_back(build_posterior(on[r], off[r], prior));
      append(&estimates, expected_counts(posts.back(), windows[r]));
    }
    (flat ? bundle.flat_threshold : bundle.threshold) =
        select_threshold(posts, truths, cfg.match);
    const System s = flat ? System::odo_flat : System::odo;
    bundle.calibration[s] = calibrate(system_name(s), estimates, truth_total);
  }
  {
    std::vector<double> estimates;
    for (std::size_t r = 0; r < n_rec; ++r)
      append(&estimates, curve_counts(on[r], windows[r]));
    bundle.calibration.raw_onset =
        calibrate(system_name(System::raw_onset), estimates, truth_total);
  }

  int k_max = 0;
  if (cfg.train_hmm) {
    for (bool expanded : {false, true}) {
      std::vector<HmmTrainingSequence> seqs;
      for (std::size_t r = 0; r < n_rec; ++r) {
        HmmTrainingSequence s;
        s.observations = expanded ? augment_observations(fronts[r].hmm_features,
                                                         on[r], off[r])
                                  : fronts[r].hmm_features;
        s.cardinality = derive_cardinality(recordings[r].truth,
                                           fronts[r].n_frames(), hop);
        s.labels = labels[r];
        seqs.push_back(std::move(s));
      }
      HmmOptions opts = cfg.hmm;
      opts.expanded = expanded;
      opts.seed = derive_seed(cfg.seed, expanded ? 5 : 4);
      HmmModel model = train_hmm(seqs, opts);
      k_max = model.k_max;
      std::vector<double> estimates;
      for (std::size_t r = 0; r < n_rec; ++r) {
        const auto path = viterbi(model, seqs[r].observations);
        const auto tr = states_to_transcript(path, model, hop, cfg.pairing);
        for (const auto &w : windows[r])
          estimates.push_back(hmm_count(tr, w.start_seconds, w.end_seconds));
      }
      const System s = expanded ? System::combined : System::hmm;
      bundle.calibration[s] = calibrate(system_name(s), estimates, truth_total);
      (expanded ? bundle.combined : bundle.hmm) = std::move(model);
    }
  }

  if (summary) {
    summary->n_recordings = static_cast<Index>(n_rec);
    summary->n_events = static_cast<Index>(durations.size());
    summary->n_frames = total_frames;
    summary->k_max = k_max;
  }
  return bundle;
}

Analysis analyse(const ModelBundle &bundle, const AudioClip &clip) {
  if (bundle.sample_rate != 0 && clip.sample_rate != bundle.sample_rate)
    throw Error(Errc::dimension_mismatch,
                "front end: bundle trained at " + std::to_string(bundle.sample_rate) +
                    " Hz, audio is " + std::to_string(clip.sample_rate) + " Hz");
  return analyse(bundle,
                 std::make_shared<const FrontEnd>(
                     compute_front_end(clip, bundle.config.front_end)),
                 clip.duration_seconds());
}

Analysis analyse(const ModelBundle &bundle,
                 std::shared_ptr<const FrontEnd> front_end,
                 double duration_seconds) {
  Analysis a;
  a.duration_seconds = duration_seconds;
  a.front_end = std::move(front_end);
  const FrontEnd &fe = *a.front_end;
  const double hop = fe.hop_seconds();
  auto check = [](const char *stage, Index want, Index got) {
    if (want != got)
      throw Error(Errc::dimension_mismatch,
                  std::string(stage) + ": model expects " + std::to_string(want) +
                      " features, front end produced " + std::to_string(got));
  };
  check("onset detector", bundle.onset_forest.feature_dim,
        fe.detector_features.cols());
  check("offset detector", bundle.offset_forest.feature_dim,
        fe.detector_features.cols());
  a.onset_raw = predict_raw(bundle.onset_forest, fe.detector_features, hop,
                            EdgeKind::onset);
  a.offset_raw = predict_raw(bundle.offset_forest, fe.detector_features, hop,
                             EdgeKind::offset);
  a.onset = sharpen(bundle.onset_sharpener, a.onset_raw);
  a.offset = sharpen(bundle.offset_sharpener, a.offset_raw);
  if (bundle.hmm)
    check("hmm observations", bundle.hmm->obs_dim, fe.hmm_features.cols());
  if (bundle.combined)
    check("combined observations", bundle.combined->obs_dim,
          fe.hmm_features.cols() + 2);
  return a;
}

EventPosterior posterior(const ModelBundle &bundle, const Analysis &analysis,
                         bool flat) {
  return build_posterior(analysis.onset, analysis.offset,
                         flat ? bundle.flat : bundle.prior);
}

namespace {

const HmmModel &require_hmm(const ModelBundle &bundle, System system) {
  const auto &m = system == System::hmm ? bundle.hmm : bundle.combined;
  if (!m)
    throw Error(Errc::invalid_argument,
                "bundle holds no model for system " + std::string(system_name(system)));
  return *m;
}

Transcript hmm_transcript(const ModelBundle &bundle, const Analysis &analysis,
                          System system) {
  const HmmModel &model = require_hmm(bundle, system);
  const FrontEnd &fe = *analysis.front_end;
  const auto path =
      system == System::hmm
          ? viterbi(model, fe.hmm_features)
          : viterbi(model, augment_observations(fe.hmm_features, analysis.onset,
                                                analysis.offset));
  return states_to_transcript(path, model, fe.hop_seconds(), bundle.config.pairing);
}

}  // namespace

Transcript detect(const ModelBundle &bundle, const Analysis &analysis,
                  System system) {
  switch (system) {
    case System::odo:
      return extract_transcript(posterior(bundle, analysis), bundle.threshold);
    case System::odo_flat:
      return extract_transcript(posterior(bundle, analysis, true),
                                bundle.flat_threshold);
    case System::hmm:
    case System::combined:
      return hmm_transcript(bundle, analysis, system);
    case System::raw_onset:
      break;
  }
  throw Error(Errc::invalid_argument, "raw_onset is a counting system only");
}

std::vector<double> count(const ModelBundle &bundle, const Analysis &analysis,
                          System system, std::span<const CountWindow> windows) {
  const CalibrationFactor cal = bundle.calibration[system];
  switch (system) {
    case System::odo:
    case System::odo_flat:
      return expected_counts(posterior(bundle, analysis, system == System::odo_flat),
                             windows, cal);
    case System::hmm:
    case System::combined: {
      const auto tr = hmm_transcript(bundle, analysis, system);
      std::vector<double> out;
      for (const auto &w : windows)
        out.push_back(hmm_count(tr, w.start_seconds, w.end_seconds, cal));
      return out;
    }
    case System::raw_onset: {
      auto out = curve_counts(analysis.onset, windows);
      for (double &v : out) v *= cal.factor;
      return out;
    }
  }
  return {};
}

}  // namespace odo
