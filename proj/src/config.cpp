// odo/src/config.cpp

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

#include "odo/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "odo/error.hpp"
#include "odo/io.hpp"

namespace odo {

namespace {

struct Entry {
  const char *key;
  std::function<std::string(const Settings &)> get;
  std::function<void(Settings &, std::string_view)> set;
};

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(Errc::invalid_argument,
              "config: bad value '" + std::string(value) + "' for " + std::string(key));
}

template <typename T>
T parse_as(std::string_view key, std::string_view value) {
  if constexpr (std::is_same_v<T, bool>) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    bad_value(key, value);
  } else {
    T v{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) bad_value(key, value);
    return v;
  }
}

template <typename T>
std::string show(T v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_floating_point_v<T>) {
    // Shortest text that reads back to the same value.
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, double(v));
    return std::string(buf, r.ptr);
  } else {
    return std::to_string(v);
  }
}

// Entry bound to a member reached through `field`.
template <typename T, typename F>
Entry bind(const char *key, F field) {
  return {key, [field](const Settings &s) { return show<T>(field(const_cast<Settings &>(s))); },
          [field, key](Settings &s, std::string_view v) { field(s) = parse_as<T>(key, v); }};
}

#define ODO_KEY(type, key, expr) \
  bind<type>(key, [](Settings &s) -> type & { return expr; })

const std::vector<Entry> &entries() {
  static const std::vector<Entry> table = {
      ODO_KEY(Index, "frame_len", s.train.front_end.frame_len),
      ODO_KEY(Index, "hop", s.train.front_end.hop),
      ODO_KEY(double, "band_lo_hz", s.train.front_end.band_lo_hz),
      ODO_KEY(double, "band_hi_hz", s.train.front_end.band_hi_hz),
      ODO_KEY(double, "median_window_seconds", s.train.front_end.median_window_seconds),
      ODO_KEY(bool, "median_clamp", s.train.front_end.median_clamp),
      ODO_KEY(Index, "detector_pool", s.train.front_end.detector_pool),
      ODO_KEY(Index, "hmm_pool", s.train.front_end.hmm_pool),
      ODO_KEY(Index, "detector_patch_before", s.train.front_end.detector_geometry.before),
      ODO_KEY(Index, "detector_patch_after", s.train.front_end.detector_geometry.after),
      ODO_KEY(Index, "hmm_patch_before", s.train.front_end.hmm_geometry.before),
      ODO_KEY(Index, "hmm_patch_after", s.train.front_end.hmm_geometry.after),
      ODO_KEY(int, "n_trees", s.train.forest.n_trees),
      ODO_KEY(int, "max_depth", s.train.forest.max_depth),
      ODO_KEY(int, "min_samples_split", s.train.forest.min_samples_split),
      ODO_KEY(int, "min_samples_leaf", s.train.forest.min_samples_leaf),
      ODO_KEY(int, "max_features", s.train.forest.max_features),
      ODO_KEY(bool, "bootstrap", s.train.forest.bootstrap),
      ODO_KEY(double, "negative_ratio", s.train.negative_ratio),
      ODO_KEY(Index, "sharpener_window", s.train.sharpener_window),
      {"sharpener_source",
       [](const Settings &s) {
         return std::string(s.train.sharpener_source == SharpenerSource::in_sample
                                ? "in_sample"
                                : "out_of_bag");
       },
       [](Settings &s, std::string_view v) {
         if (v == "in_sample") s.train.sharpener_source = SharpenerSource::in_sample;
         else if (v == "out_of_bag") s.train.sharpener_source = SharpenerSource::out_of_bag;
         else bad_value("sharpener_source", v);
       }},
      ODO_KEY(Index, "prior_components", s.train.prior_components),
      ODO_KEY(double, "prior_widen", s.train.prior_widen),
      ODO_KEY(bool, "flat_prior", s.train.flat_prior),
      ODO_KEY(double, "onset_tolerance_seconds", s.train.match.onset_tolerance_seconds),
      ODO_KEY(double, "duration_ratio_tolerance", s.train.match.duration_ratio_tolerance),
      ODO_KEY(double, "count_window_seconds", s.train.count_window_seconds),
      ODO_KEY(bool, "train_hmm", s.train.train_hmm),
      ODO_KEY(Index, "hmm_components", s.train.hmm.n_components),
      ODO_KEY(double, "hmm_variance_floor", s.train.hmm.variance_floor),
      ODO_KEY(double, "hmm_tolerance", s.train.hmm.tolerance),
      ODO_KEY(int, "hmm_max_iterations", s.train.hmm.max_iterations),
      ODO_KEY(Index, "hmm_max_frames_per_state", s.train.hmm.max_frames_per_state),
      {"pairing",
       [](const Settings &s) {
         return std::string(s.train.pairing == PairingOrder::fifo ? "fifo" : "lifo");
       },
       [](Settings &s, std::string_view v) {
         if (v == "fifo") s.train.pairing = PairingOrder::fifo;
         else if (v == "lifo") s.train.pairing = PairingOrder::lifo;
         else bad_value("pairing", v);
       }},
      ODO_KEY(std::uint64_t, "seed", s.seed),
      ODO_KEY(int, "threads", s.threads),
      ODO_KEY(double, "scene_duration_seconds", s.scene.duration_seconds),
      ODO_KEY(double, "scene_rate_per_minute", s.scene.rate_per_minute),
      ODO_KEY(double, "scene_duration_median_seconds", s.scene.duration_median_seconds),
      ODO_KEY(double, "scene_duration_sigma", s.scene.duration_sigma),
      ODO_KEY(double, "scene_min_call_seconds", s.scene.min_call_seconds),
      ODO_KEY(double, "scene_max_call_seconds", s.scene.max_call_seconds),
      ODO_KEY(double, "scene_band_lo_hz", s.scene.call_band_lo_hz),
      ODO_KEY(double, "scene_band_hi_hz", s.scene.call_band_hi_hz),
      ODO_KEY(double, "scene_snr_db", s.scene.snr_db),
      {"scene_noise",
       [](const Settings &s) {
         return std::string(s.scene.noise_kind == NoiseKind::white ? "white" : "pink");
       },
       [](Settings &s, std::string_view v) {
         if (v == "white") s.scene.noise_kind = NoiseKind::white;
         else if (v == "pink") s.scene.noise_kind = NoiseKind::pink;
         else bad_value("scene_noise", v);
       }},
      ODO_KEY(int, "scene_sample_rate", s.scene.sample_rate),
      ODO_KEY(double, "scene_segment_seconds", s.scene.segment_seconds),
      ODO_KEY(double, "scene_edge_margin_seconds", s.scene.edge_margin_seconds),
      ODO_KEY(Index, "fold_factor", s.fold_factor),
      ODO_KEY(double, "fold_peak", s.fold_peak),
      ODO_KEY(Index, "n_sessions", s.n_sessions),
  };
  return table;
}

#undef ODO_KEY

const Entry &find(std::string_view key) {
  for (const auto &e : entries())
    if (key == e.key) return e;
  throw Error(Errc::invalid_argument, "config: unknown key '" + std::string(key) + "'");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Settings default_settings() { return Settings{}; }

void set_setting(Settings *settings, std::string_view key, std::string_view value) {
  find(key).set(*settings, trim(value));
}

std::string get_setting(const Settings &settings, std::string_view key) {
  return find(key).get(settings);
}

std::vector<std::string> setting_keys() {
  std::vector<std::string> out;
  for (const auto &e : entries()) out.emplace_back(e.key);
  return out;
}

void apply_config_text(Settings *settings, const std::string &text,
                       const std::string &source) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::format, source + ":" + std::to_string(lineno) +
                                    ": expected key = value");
    try {
      set_setting(settings, trim(view.substr(0, eq)), view.substr(eq + 1));
    } catch (const Error &e) {
      throw Error(e.code(), source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void load_config_file(Settings *settings, const std::string &path) {
  apply_config_text(settings, read_text(path), path);
}

void apply_env_overrides(Settings *settings) {
  for (const auto &e : entries()) {
    std::string name = kEnvPrefix;
    for (const char *c = e.key; *c; ++c)
      name += static_cast<char>(std::toupper(static_cast<unsigned char>(*c)));
    if (const char *v = std::getenv(name.c_str())) {
      try {
        e.set(*settings, trim(v));
      } catch (const Error &err) {
        throw Error(err.code(), name + ": " + err.what());
      }
    }
  }
}

void resolve(Settings *settings) {
  settings->train.seed = settings->seed;
  settings->scene.seed = settings->seed;
  settings->train.forest.threads = settings->threads;
}

std::string describe(const Settings &settings) {
  std::string out;
  for (const auto &e : entries()) out += std::string(e.key) + " = " + e.get(settings) + "\n";
  return out;
}

}  // namespace odo
