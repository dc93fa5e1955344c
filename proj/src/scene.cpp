// odo/src/scene.cpp

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

#include "odo/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "odo/error.hpp"

namespace odo {

void SceneConfig::validate() const {
  auto fail = [](const std::string &what) {
    throw Error(Errc::invalid_argument, "scene config: " + what);
  };
  if (!(duration_seconds > 0.0)) fail("duration_seconds must be > 0");
  if (!(rate_per_minute > 0.0)) fail("rate_per_minute must be > 0");
  if (!(duration_median_seconds > 0.0)) fail("duration_median_seconds must be > 0");
  if (!(duration_sigma >= 0.0)) fail("duration_sigma must be >= 0");
  if (!(min_call_seconds > 0.0 && min_call_seconds < max_call_seconds))
    fail("need 0 < min_call_seconds < max_call_seconds");
  if (!(call_band_lo_hz >= 500.0 && call_band_hi_hz <= 20000.0 &&
        call_band_lo_hz / 0.9 <= call_band_hi_hz))
    fail("call band must lie within 500-20000 Hz and span a 10% glide");
  if (sample_rate <= 0 || call_band_hi_hz >= 0.5 * sample_rate)
    fail("call band must lie below the Nyquist frequency");
  if (segment_seconds < 0.0) fail("segment_seconds must be >= 0");
}

std::vector<float> synth_call(double duration_seconds, double f0_hz,
                              int sample_rate, double phase) {
  const auto n = static_cast<std::size_t>(std::llround(duration_seconds * sample_rate));
  std::vector<float> out(n, 0.0f);
  if (n < 2) return out;
  const double end = double(n - 1) / sample_rate;
  const double ramp = std::min(0.005, 0.5 * end);
  std::vector<double> x(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = double(i) / sample_rate;
    // f(t) = f0 (1 - 0.1 t / T), integrated.
    const double arg = 2.0 * std::numbers::pi *
                       (f0_hz * t - 0.05 * f0_hz * t * t / duration_seconds);
    double env = 1.0;
    if (t < ramp) env = 0.5 - 0.5 * std::cos(std::numbers::pi * t / ramp);
    if (end - t < ramp)
      env = std::min(env, 0.5 - 0.5 * std::cos(std::numbers::pi * (end - t) / ramp));
    x[i] = env * std::sin(phase + arg);
    peak = std::max(peak, std::abs(x[i]));
  }
  x[0] = 0.0;
  x[n - 1] = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    out[i] = static_cast<float>(peak > 0.0 ? x[i] / peak : 0.0);
  return out;
}

void render_calls(std::span<const CallSpec> calls, int sample_rate,
                  std::vector<float> *out) {
  for (const CallSpec &c : calls) {
    const auto wave = synth_call(c.duration_seconds, c.f0_hz, sample_rate, c.phase);
    const auto start =
        static_cast<std::size_t>(std::llround(c.onset_seconds * sample_rate));
    if (out->size() < start + wave.size()) out->resize(start + wave.size(), 0.0f);
    for (std::size_t i = 0; i < wave.size(); ++i) (*out)[start + i] += wave[i];
  }
}

LabeledScene generate_scene(const SceneConfig &cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::exponential_distribution<double> gap(cfg.rate_per_minute / 60.0);
  std::lognormal_distribution<double> length(std::log(cfg.duration_median_seconds),
                                             cfg.duration_sigma);
  std::uniform_real_distribution<double> f0(cfg.call_band_lo_hz / 0.9,
                                            cfg.call_band_hi_hz);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  LabeledScene scene;
  scene.audio.sample_rate = cfg.sample_rate;
  const auto n_samples =
      static_cast<std::size_t>(std::llround(cfg.duration_seconds * cfg.sample_rate));
  for (double t = gap(rng); t < cfg.duration_seconds; t += gap(rng)) {
    double d;
    do {
      d = length(rng);
    } while (d < cfg.min_call_seconds || d > cfg.max_call_seconds);
    CallSpec call{t, d, f0(rng), phase(rng)};
    // Snap to the sample grid so the transcript matches the rendering.
    call.onset_seconds = std::round(t * cfg.sample_rate) / cfg.sample_rate;
    call.duration_seconds =
        std::llround(d * cfg.sample_rate) / double(cfg.sample_rate);
    double limit = cfg.duration_seconds;
    if (cfg.segment_seconds > 0.0)
      limit = std::min(limit, (std::floor(call.onset_seconds / cfg.segment_seconds) + 1.0) *
                                  cfg.segment_seconds);
    if (call.onset_seconds + call.duration_seconds + cfg.edge_margin_seconds > limit)
      continue;
    scene.calls.push_back(call);
    scene.truth.events.push_back({call.onset_seconds, call.duration_seconds, 1.0});
  }
  scene.truth.sort();

  scene.audio.samples.assign(n_samples, 0.0f);
  render_calls(scene.calls, cfg.sample_rate, &scene.audio.samples);
  scene.audio.samples.resize(n_samples);

  if (std::isfinite(cfg.snr_db)) {
    std::normal_distribution<double> white(0.0, 1.0);
    std::vector<float> noise(n_samples);
    double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
    double energy = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
      const double w = white(rng);
      double v = w;
      if (cfg.noise_kind == NoiseKind::pink) {
        // Paul Kellet's refined pink filter.
        b0 = 0.99886 * b0 + w * 0.0555179;
        b1 = 0.99332 * b1 + w * 0.0750759;
        b2 = 0.96900 * b2 + w * 0.1538520;
        b3 = 0.86650 * b3 + w * 0.3104856;
        b4 = 0.55000 * b4 + w * 0.5329522;
        b5 = -0.7616 * b5 - w * 0.0168980;
        v = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
        b6 = w * 0.115926;
      }
      noise[i] = static_cast<float>(v);
      energy += double(noise[i]) * double(noise[i]);
    }
    const double rms = std::sqrt(energy / double(std::max<std::size_t>(n_samples, 1)));
    const double target = std::pow(10.0, -cfg.snr_db / 20.0);
    const double scale = rms > 0.0 ? target / rms : 0.0;
    for (std::size_t i = 0; i < n_samples; ++i)
      scene.audio.samples[i] += static_cast<float>(noise[i] * scale);
  }
  return scene;
}

LabeledScene fold_scene(std::span<const LabeledScene> segments, double peak) {
  if (segments.empty())
    throw Error(Errc::invalid_argument, "fold_scene: no segments");
  LabeledScene out;
  out.audio.sample_rate = segments.front().audio.sample_rate;
  std::size_t len = 0;
  for (const auto &s : segments) {
    if (s.audio.sample_rate != out.audio.sample_rate)
      throw Error(Errc::invalid_argument, "fold_scene: sample rates differ");
    len = std::max(len, s.audio.samples.size());
  }
  std::vector<double> sum(len, 0.0);
  for (const auto &s : segments) {
    for (std::size_t i = 0; i < s.audio.samples.size(); ++i) sum[i] += s.audio.samples[i];
    out.truth.events.insert(out.truth.events.end(), s.truth.events.begin(),
                            s.truth.events.end());
    out.calls.insert(out.calls.end(), s.calls.begin(), s.calls.end());
  }
  double max_abs = 0.0;
  for (double v : sum) max_abs = std::max(max_abs, std::abs(v));
  const double scale = peak > 0.0 && max_abs > 0.0 ? peak / max_abs : 1.0;
  out.audio.samples.resize(len);
  for (std::size_t i = 0; i < len; ++i)
    out.audio.samples[i] = static_cast<float>(sum[i] * scale);
  out.truth.sort();
  return out;
}

std::vector<LabeledScene> split_scene(const LabeledScene &scene, Index n) {
  if (n < 1) throw Error(Errc::invalid_argument, "split_scene: n must be >= 1");
  const int sr = scene.audio.sample_rate;
  const std::size_t seg_len = scene.audio.samples.size() / std::size_t(n);
  if (seg_len == 0) throw Error(Errc::insufficient_samples, "split_scene: scene too short");
  const double seg_seconds = double(seg_len) / sr;
  std::vector<LabeledScene> out(n);
  for (Index k = 0; k < n; ++k) {
    out[k].audio.sample_rate = sr;
    out[k].audio.samples.assign(scene.audio.samples.begin() + k * seg_len,
                                scene.audio.samples.begin() + (k + 1) * seg_len);
  }
  std::size_t clipped = 0;
  for (const Event &e : scene.truth.events) {
    const auto k = static_cast<Index>(std::floor(e.onset_seconds / seg_seconds));
    if (k < 0 || k >= n) continue;
    Event shifted = e;
    shifted.onset_seconds -= double(k) * seg_seconds;
    const double room = seg_seconds - shifted.onset_seconds - 1.0 / sr;
    if (shifted.duration_seconds > room) {
      shifted.duration_seconds = room;
      ++clipped;
    }
    if (shifted.duration_seconds > 0.0) out[k].truth.events.push_back(shifted);
  }
  for (const CallSpec &c : scene.calls) {
    const auto k = static_cast<Index>(std::floor(c.onset_seconds / seg_seconds));
    if (k < 0 || k >= n) continue;
    CallSpec shifted = c;
    shifted.onset_seconds -= double(k) * seg_seconds;
    out[k].calls.push_back(shifted);
  }
  if (clipped > 0)
    warn("split_scene: clipped " + std::to_string(clipped) +
         " event(s) crossing a segment boundary");
  for (auto &s : out) s.truth.sort();
  return out;
}

LabeledScene fold_dense(const LabeledScene &scene, Index n) {
  const auto segments = split_scene(scene, n);
  return fold_scene(segments);
}

}  // namespace odo
