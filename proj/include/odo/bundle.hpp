// odo/bundle.hpp

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

#ifndef ODO_BUNDLE_HPP_
#define ODO_BUNDLE_HPP_

#include <string>

#include "odo/pipeline.hpp"

namespace odo {

inline constexpr const char *kBundleSchema = "odo-bundle";

/// JSON text led by the schema id and version. Every number is written so
/// that it parses back to the identical value.
std::string serialize_bundle(const ModelBundle &bundle);
ModelBundle deserialize_bundle(const std::string &text);

void save_bundle(const std::string &path, const ModelBundle &bundle);
ModelBundle load_bundle(const std::string &path);

}  // namespace odo

#endif  // ODO_BUNDLE_HPP_
