// odo/error.hpp

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

#ifndef ODO_ERROR_HPP_
#define ODO_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace odo {

enum class Errc {
  invalid_argument,
  insufficient_samples,
  degenerate_supervision,
  dimension_mismatch,
  unexplained_observation,
  empty_state,
  io,
  format,
};

std::string_view errc_name(Errc code);

/// Every failure raised by the library. The code is stable and is what the
/// CLI prints as its machine-readable prefix.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string &what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Non-fatal diagnostics (component count reductions, merged duplicates).
/// Goes to stderr unless a sink is installed.
void warn(const std::string &message);

using WarningSink = void (*)(const std::string &);
WarningSink set_warning_sink(WarningSink sink);

}  // namespace odo

#endif  // ODO_ERROR_HPP_
