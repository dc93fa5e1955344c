// odo/src/error.cpp

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

#include "odo/error.hpp"

#include <atomic>
#include <iostream>

namespace odo {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::insufficient_samples: return "insufficient_samples";
    case Errc::degenerate_supervision: return "degenerate_supervision";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::unexplained_observation: return "unexplained_observation";
    case Errc::empty_state: return "empty_state";
    case Errc::io: return "io";
    case Errc::format: return "format";
  }
  return "unknown";
}

namespace {
std::atomic<WarningSink> g_sink{nullptr};
}

void warn(const std::string &message) {
  if (auto sink = g_sink.load()) {
    sink(message);
    return;
  }
  std::cerr << "warning: " << message << '\n';
}

WarningSink set_warning_sink(WarningSink sink) { return g_sink.exchange(sink); }

}  // namespace odo
