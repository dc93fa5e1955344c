// odo/wav.hpp

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

#ifndef ODO_WAV_HPP_
#define ODO_WAV_HPP_

#include <string>

#include "odo/dsp.hpp"

namespace odo {

enum class WavFormat { pcm16, float32 };

/// Reads a single-channel RIFF/WAVE file holding 16-bit PCM or 32-bit float
/// samples. Multi-channel files are rejected.
AudioClip read_wav(const std::string &path);

void write_wav(const std::string &path, const AudioClip &clip,
               WavFormat format = WavFormat::float32);

}  // namespace odo

#endif  // ODO_WAV_HPP_
