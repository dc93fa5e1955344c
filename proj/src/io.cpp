// odo/src/io.cpp

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

#include "odo/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "odo/error.hpp"

namespace odo {

namespace {

std::string num(double v, int digits = 17) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double parse_number(std::string_view cell, const std::string &where) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
    cell.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    throw Error(Errc::format, where + ": not a number: '" + std::string(cell) + "'");
  return v;
}

}  // namespace

std::string format_annotations(const Transcript &transcript, bool with_confidence) {
  std::string out = with_confidence ? "onset_seconds,duration_seconds,confidence\n"
                                    : "onset_seconds,duration_seconds\n";
  for (const Event &e : transcript.events) {
    out += num(e.onset_seconds) + ',' + num(e.duration_seconds);
    if (with_confidence) out += ',' + num(e.confidence);
    out += '\n';
  }
  return out;
}

Transcript parse_annotations(const std::string &text, const std::string &source) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line))
    throw Error(Errc::format, source + ": empty annotation file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "onset_seconds,duration_seconds" &&
      line != "onset_seconds,duration_seconds,confidence")
    throw Error(Errc::format, source + ": expected header "
                                       "onset_seconds,duration_seconds[,confidence]");
  const bool with_conf = line.size() > 31;
  Transcript tr;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != (with_conf ? 3u : 2u))
      throw Error(Errc::format, where + ": wrong number of columns");
    Event e;
    e.onset_seconds = parse_number(cells[0], where);
    e.duration_seconds = parse_number(cells[1], where);
    if (with_conf) e.confidence = parse_number(cells[2], where);
    if (!(e.onset_seconds >= 0.0) || !(e.duration_seconds > 0.0))
      throw Error(Errc::format, where + ": need onset >= 0 and duration > 0");
    tr.events.push_back(e);
  }
  tr.sort();
  return tr;
}

void write_text(const std::string &path, const std::string &text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::io, "cannot write " + path);
  os << text;
  if (!os) throw Error(Errc::io, "write failed: " + path);
}

std::string read_text(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::io, "cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_annotations(const std::string &path, const Transcript &transcript,
                       bool with_confidence) {
  write_text(path, format_annotations(transcript, with_confidence));
}

Transcript read_annotations(const std::string &path) {
  return parse_annotations(read_text(path), path);
}

void write_spectrogram_csv(const std::string &path, const Spectrogram<float> &spec) {
  std::ofstream os(path);
  if (!os) throw Error(Errc::io, "cannot write " + path);
  os << "hop_seconds=" << num(spec.hop_seconds);
  for (double f : spec.bin_freqs) os << ',' << num(f, 10);
  os << '\n';
  for (Index t = 0; t < spec.n_frames(); ++t) {
    os << num(double(t) * spec.hop_seconds, 10);
    for (Index b = 0; b < spec.n_bins(); ++b) os << ',' << num(spec.values(t, b), 9);
    os << '\n';
  }
  if (!os) throw Error(Errc::io, "write failed: " + path);
}

void write_posterior_csv(const std::string &path, const EventPosterior &post) {
  std::ofstream os(path);
  if (!os) throw Error(Errc::io, "cannot write " + path);
  os << "onset_seconds";
  for (Index tau = post.tau_min; tau <= post.tau_max; ++tau) os << ",tau_" << tau;
  os << '\n';
  for (Index t = 0; t < post.n_frames(); ++t) {
    os << num(frame_midpoint(t, post.hop_seconds), 10);
    for (Index k = 0; k < post.n_taus(); ++k) os << ',' << num(post.values(t, k), 9);
    os << '\n';
  }
  if (!os) throw Error(Errc::io, "write failed: " + path);
}

std::string format_counts(std::span<const CountWindow> windows,
                          std::span<const double> counts) {
  if (windows.size() != counts.size())
    throw Error(Errc::dimension_mismatch, "format_counts: one count per window");
  std::string out = "start_seconds,end_seconds,count\n";
  for (std::size_t i = 0; i < windows.size(); ++i)
    out += num(windows[i].start_seconds) + ',' + num(windows[i].end_seconds) + ',' +
           num(counts[i]) + '\n';
  return out;
}

}  // namespace odo
