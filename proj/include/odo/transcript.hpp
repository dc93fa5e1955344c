// odo/transcript.hpp

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

#ifndef ODO_TRANSCRIPT_HPP_
#define ODO_TRANSCRIPT_HPP_

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <vector>

namespace odo {

using Eigen::Index;

struct Event {
  double onset_seconds = 0.0;
  double duration_seconds = 0.0;
  double confidence = 1.0;  // 1.0 for ground truth

  double offset_seconds() const { return onset_seconds + duration_seconds; }
};

/// Events sorted by onset, then duration.
struct Transcript {
  std::vector<Event> events;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }

  void sort() {
    std::stable_sort(events.begin(), events.end(),
                     [](const Event &a, const Event &b) {
                       if (a.onset_seconds != b.onset_seconds)
                         return a.onset_seconds < b.onset_seconds;
                       return a.duration_seconds < b.duration_seconds;
                     });
  }
};

/// Frame whose span [t*hop, (t+1)*hop) contains `seconds`. The small slack
/// keeps times that sit on a frame boundary in the later frame.
inline Index frame_containing(double seconds, double hop_seconds) {
  return static_cast<Index>(std::floor(seconds / hop_seconds + 1e-9));
}

inline double frame_midpoint(Index frame, double hop_seconds) {
  return (double(frame) + 0.5) * hop_seconds;
}

}  // namespace odo

#endif  // ODO_TRANSCRIPT_HPP_
