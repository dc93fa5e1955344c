// odo/io.hpp

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

#ifndef ODO_IO_HPP_
#define ODO_IO_HPP_

#include <span>
#include <string>
#include <vector>

#include "odo/dsp.hpp"
#include "odo/metrics.hpp"
#include "odo/odo.hpp"
#include "odo/transcript.hpp"

namespace odo {

/// Headered CSV `onset_seconds,duration_seconds[,confidence]`, times printed
/// with 17 significant digits.
std::string format_annotations(const Transcript &transcript,
                               bool with_confidence = false);
Transcript parse_annotations(const std::string &text,
                             const std::string &source = "<annotations>");
void write_annotations(const std::string &path, const Transcript &transcript,
                       bool with_confidence = false);
Transcript read_annotations(const std::string &path);

/// Header `hop_seconds=<hop>,<bin freqs...>`, then one row per frame:
/// frame start time followed by the magnitudes.
void write_spectrogram_csv(const std::string &path, const Spectrogram<float> &spec);

/// Header `onset_seconds,tau_<min>,...,tau_<max>`, one row per onset frame.
void write_posterior_csv(const std::string &path, const EventPosterior &post);

/// Header `start_seconds,end_seconds,count`.
std::string format_counts(std::span<const CountWindow> windows,
                          std::span<const double> counts);
void write_text(const std::string &path, const std::string &text);
std::string read_text(const std::string &path);

}  // namespace odo

#endif  // ODO_IO_HPP_
