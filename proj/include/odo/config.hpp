// odo/config.hpp

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

#ifndef ODO_CONFIG_HPP_
#define ODO_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "odo/pipeline.hpp"
#include "odo/scene.hpp"

namespace odo {

/// Every tunable of the command-line tool. Keys are flat `name = value`
/// pairs; see setting_keys() for the list.
struct Settings {
  TrainConfig train;
  SceneConfig scene;
  std::uint64_t seed = 1;
  int threads = 0;
  /// Experiment grid: scenes folded into a dense recording, and the peak
  /// the fold is rescaled to (non-positive keeps the plain sum).
  Index fold_factor = 3;
  double fold_peak = 0.0;
  Index n_sessions = 2;
};

/// Defaults of the original analysis; runtime-oriented keys (pooling,
/// negative subsampling, per-state frame caps) are off.
Settings default_settings();

/// Throws Errc::invalid_argument for unknown keys or unparsable values.
void set_setting(Settings *settings, std::string_view key, std::string_view value);
std::string get_setting(const Settings &settings, std::string_view key);
std::vector<std::string> setting_keys();

/// `key = value` lines; `#` starts a comment.
void apply_config_text(Settings *settings, const std::string &text,
                       const std::string &source = "<config>");
void load_config_file(Settings *settings, const std::string &path);

/// Environment variables named ODO_<KEY> (upper case) override keys.
inline constexpr const char *kEnvPrefix = "ODO_";
void apply_env_overrides(Settings *settings);

/// Copies the shared seed and thread count into the component configs.
void resolve(Settings *settings);

/// All keys with their current values, one `key = value` per line.
std::string describe(const Settings &settings);

}  // namespace odo

#endif  // ODO_CONFIG_HPP_
