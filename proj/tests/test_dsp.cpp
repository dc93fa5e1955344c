// odo/tests/test_dsp.cpp

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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "odo/dsp.hpp"
#include "odo/error.hpp"
#include "oracles.hpp"

using namespace odo;

namespace {

AudioClip sine_clip(double freq, int rate, Index n) {
  AudioClip c;
  c.sample_rate = rate;
  c.samples.resize(n);
  for (Index i = 0; i < n; ++i)
    c.samples[i] = float(std::sin(2.0 * std::numbers::pi * freq * double(i) / rate));
  return c;
}

AudioClip noise_clip(std::uint64_t seed, int rate, Index n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g(0.0f, 0.3f);
  AudioClip c;
  c.sample_rate = rate;
  c.samples.resize(n);
  for (auto &s : c.samples) s = g(rng);
  return c;
}

Spectrogram<double> random_spec(std::uint64_t seed, Index frames, Index bins) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  Spectrogram<double> s;
  s.values.resize(frames, bins);
  for (Index t = 0; t < frames; ++t)
    for (Index b = 0; b < bins; ++b) s.values(t, b) = u(rng);
  s.hop_seconds = 0.01;
  for (Index b = 0; b < bins; ++b) s.bin_freqs.push_back(100.0 * double(b));
  return s;
}

}  // namespace

TEST_CASE("spectrogram frame arithmetic") {
  const auto spec = compute_spectrogram<float>(noise_clip(1, 96000, 96000), 2048, 1024);
  CHECK(spec.n_frames() == 92);
  CHECK(spec.n_bins() == 1025);
  CHECK(spec.hop_seconds == doctest::Approx(1024.0 / 96000.0));
  for (std::size_t k = 1; k < spec.bin_freqs.size(); ++k)
    CHECK(spec.bin_freqs[k] > spec.bin_freqs[k - 1]);
  CHECK((spec.values.array() >= 0.0f).all());
}

TEST_CASE("all-zero clip gives all-zero magnitudes") {
  AudioClip c;
  c.sample_rate = 16000;
  c.samples.assign(8192, 0.0f);
  const auto spec = compute_spectrogram<double>(c, 512, 256);
  CHECK(spec.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bin-centred sine peaks at its bin and matches a direct DFT") {
  const int rate = 96000;
  const Index n = 2048, k = 100;
  const auto clip = sine_clip(double(k) * rate / n, rate, 20 * n);
  const auto spec = compute_spectrogram<double>(clip, n, n / 2);
  for (Index t = 1; t + 1 < spec.n_frames(); ++t) {
    Index arg;
    spec.values.row(t).maxCoeff(&arg);
    CHECK(arg == k);
  }
  // Direct DFT of frame 3 with a periodic Hann window.
  const Index t = 3;
  for (Index bin : {Index(0), Index(99), k, Index(101), Index(500)}) {
    std::complex<double> acc = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
      const double x = w * double(clip.samples[t * n / 2 + i]);
      acc += x * std::polar(1.0, -2.0 * std::numbers::pi * double(bin * i) / n);
    }
    CHECK(spec.values(t, bin) == doctest::Approx(std::abs(acc)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("short clip is an insufficient-samples error") {
  AudioClip c;
  c.sample_rate = 96000;
  c.samples.assign(2047, 0.0f);
  try {
    compute_spectrogram<float>(c, 2048, 1024);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.code() == Errc::insufficient_samples);
  }
  CHECK_THROWS_AS(compute_spectrogram<float>(noise_clip(1, 8000, 4096), 2048, 1000), Error);
}

TEST_CASE("frames shared with a hop-aligned part are identical") {
  const auto whole = noise_clip(7, 96000, 40 * 1024);
  AudioClip part;
  part.sample_rate = whole.sample_rate;
  const Index offset = 6 * 1024;
  part.samples.assign(whole.samples.begin() + offset, whole.samples.begin() + offset + 20 * 1024);
  const auto a = compute_spectrogram<float>(whole, 2048, 1024);
  const auto b = compute_spectrogram<float>(part, 2048, 1024);
  for (Index t = 0; t < b.n_frames(); ++t) CHECK((a.values.row(t + 6) == b.values.row(t)));
}

TEST_CASE("band limit keeps bins 11..426 at 96 kHz / 2048") {
  const auto spec = compute_spectrogram<float>(noise_clip(2, 96000, 8192), 2048, 1024);
  const auto lim = band_limit(spec, 500.0, 20000.0);
  // Exhaustive scan oracle.
  std::vector<Index> kept;
  for (Index k = 0; k < spec.n_bins(); ++k)
    if (spec.bin_freqs[k] >= 500.0 && spec.bin_freqs[k] <= 20000.0) kept.push_back(k);
  REQUIRE(kept.front() == 11);
  REQUIRE(kept.back() == 426);
  CHECK(lim.n_bins() == 416);
  CHECK(lim.bin_freqs.front() == spec.bin_freqs[11]);
  CHECK(lim.bin_freqs.back() == spec.bin_freqs[426]);
  CHECK((lim.values == spec.values.middleCols(11, 416)));

  const auto same = band_limit(spec, 0.0, 48000.0);
  CHECK((same.values == spec.values));
  CHECK_THROWS_AS(band_limit(spec, 1000.0, 1000.0), Error);
  CHECK_THROWS_AS(band_limit(spec, 30.0, 40.0), Error);

  const auto nested = band_limit(band_limit(spec, 500.0, 20000.0), 2000.0, 7000.0);
  const auto direct = band_limit(spec, 2000.0, 7000.0);
  CHECK((nested.values == direct.values));
  CHECK(nested.bin_freqs == direct.bin_freqs);
}

TEST_CASE("median noise reduction") {
  SUBCASE("constant input") {
    auto s = random_spec(1, 30, 4);
    s.values.setConstant(2.5);
    CHECK(reduce_noise_median(s, 0.2).values.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("impulse survives") {
    auto s = random_spec(1, 30, 1);
    s.values.setZero();
    s.values(12, 0) = 4.0;
    const auto out = reduce_noise_median(s, 0.05);  // +-2 frames
    CHECK(out.values(12, 0) == 4.0);
    CHECK(out.values.sum() == 4.0);
  }
  SUBCASE("random band against a brute-force median") {
    const auto s = random_spec(3, 50, 3);
    const Index half = 5;  // 11-frame window
    const auto out = reduce_noise_median(s, 0.1, true);
    const auto raw = reduce_noise_median(s, 0.1, false);
    for (Index b = 0; b < 3; ++b)
      for (Index t = 0; t < 50; ++t) {
        std::vector<double> w;
        for (Index u = std::max<Index>(0, t - half); u <= std::min<Index>(49, t + half); ++u)
          w.push_back(s.values(u, b));
        std::sort(w.begin(), w.end());
        const double med = w.size() % 2 ? w[w.size() / 2]
                                        : 0.5 * (w[w.size() / 2 - 1] + w[w.size() / 2]);
        CHECK(out.values(t, b) == std::max(0.0, s.values(t, b) - med));
        CHECK(raw.values(t, b) == s.values(t, b) - med);
      }
    CHECK((out.values.array() >= 0.0).all());
    CHECK((out.values.array() <= s.values.array()).all());
  }
  SUBCASE("short recording falls back to the available frames") {
    const auto s = random_spec(4, 3, 2);
    const auto out = reduce_noise_median(s, 100.0);
    CHECK(out.n_frames() == 3);
  }
  CHECK_THROWS_AS(reduce_noise_median(random_spec(1, 5, 1), 0.0), Error);
}

TEST_CASE("time difference") {
  auto s = random_spec(5, 5, 3);
  const auto d = time_difference(s);
  REQUIRE(d.n_frames() == 4);
  for (Index t = 0; t < 4; ++t)
    for (Index b = 0; b < 3; ++b) CHECK(d.values(t, b) == s.values(t + 1, b) - s.values(t, b));

  Spectrogram<double> ramp = s;
  for (Index t = 0; t < 5; ++t) ramp.values.row(t).setConstant(double(t));
  CHECK((time_difference(ramp).values.array() == 1.0).all());
  ramp.values.setConstant(3.0);
  CHECK(time_difference(ramp).values.cwiseAbs().maxCoeff() == 0.0);

  // Cumulative sum anchored at frame 0 reconstructs the input (integers keep
  // the arithmetic exact).
  auto ints = random_spec(6, 9, 2);
  ints.values = ints.values.array().floor();
  const auto di = time_difference(ints);
  Eigen::RowVectorXd acc = ints.values.row(0);
  for (Index t = 0; t < di.n_frames(); ++t) {
    acc += di.values.row(t);
    CHECK((acc.array() == ints.values.row(t + 1).array()).all());
  }

  CHECK_THROWS_AS(time_difference(random_spec(1, 1, 3)), Error);
}

TEST_CASE("patch extraction") {
  auto s = random_spec(8, 20, 416);
  const auto p = extract_patch(s, 10, PatchGeometry{5, 5});
  CHECK(p.values.size() == 4576);
  CHECK(p.center == 10);
  for (Index k = 0; k < 11; ++k)
    CHECK((p.values.segment(k * 416, 416).transpose().array() ==
           s.values.row(5 + k).array())
              .all());

  const auto edge = extract_patch(s, 0, PatchGeometry{5, 5});
  CHECK(edge.values.head(5 * 416).cwiseAbs().maxCoeff() == 0.0);
  CHECK((edge.values.segment(5 * 416, 416).transpose().array() == s.values.row(0).array()).all());

  const auto single = extract_patch(s, 7, PatchGeometry{0, 0});
  CHECK((single.values.transpose().array() == s.values.row(7).array()).all());

  const auto rows = extract_patches(s, PatchGeometry{0, 5}, 20, 0);
  for (Index c : {Index(0), Index(9), Index(19)}) {
    const auto one = extract_patch(s, c, PatchGeometry{0, 5});
    CHECK(one.values.size() == rows.cols());
    CHECK((rows.row(c).transpose().array() == one.values.array()).all());
  }
}

TEST_CASE("band pooling averages adjacent bins") {
  const auto s = random_spec(9, 4, 10);
  const auto p = pool_bands(s, 4);
  REQUIRE(p.n_bins() == 3);
  CHECK(p.values(2, 0) == doctest::Approx(s.values.row(2).segment(0, 4).mean()));
  CHECK(p.values(1, 2) == doctest::Approx(s.values.row(1).segment(8, 2).mean()));
  CHECK(p.bin_freqs[2] == doctest::Approx(850.0));
}
