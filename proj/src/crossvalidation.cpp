// odo/src/crossvalidation.cpp

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

#include "odo/crossvalidation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "odo/error.hpp"

namespace odo {

std::string_view condition_name(Condition c) {
  switch (c) {
    case Condition::matched: return "matched";
    case Condition::train_dense: return "train_dense";
    case Condition::test_dense: return "test_dense";
  }
  return "?";
}

Condition parse_condition(std::string_view name) {
  for (Condition c : kAllConditions)
    if (condition_name(c) == name) return c;
  if (name == "train-dense") return Condition::train_dense;
  if (name == "test-dense") return Condition::test_dense;
  throw Error(Errc::invalid_argument, "unknown condition '" + std::string(name) +
                                          "' (matched, train_dense, test_dense)");
}

std::vector<Session> synth_sessions(const SceneConfig &base, Index n_sessions,
                                    Index fold, double fold_peak) {
  if (n_sessions < 1 || fold < 1)
    throw Error(Errc::invalid_argument, "synth_sessions: counts must be >= 1");
  std::vector<Session> out;
  for (Index s = 0; s < n_sessions; ++s) {
    std::vector<LabeledScene> parts;
    for (Index j = 0; j < fold; ++j) {
      SceneConfig cfg = base;
      cfg.seed = base.seed * 1000003ull + std::uint64_t(s * fold + j);
      parts.push_back(generate_scene(cfg));
    }
    Session session;
    session.dense = fold_scene(parts, fold_peak);
    session.matched = std::move(parts.front());
    out.push_back(std::move(session));
  }
  return out;
}

namespace {

std::uint64_t fingerprint(const AudioClip &clip) {
  std::uint64_t h = 1469598103934665603ull;
  const auto *bytes = reinterpret_cast<const unsigned char *>(clip.samples.data());
  const std::size_t n = clip.samples.size() * sizeof(float);
  for (std::size_t i = 0; i < n; ++i) h = (h ^ bytes[i]) * 1099511628211ull;
  return h ^ (std::uint64_t(clip.sample_rate) << 1) ^ n;
}

class FrontEndCache {
 public:
  explicit FrontEndCache(FrontEndConfig cfg) : cfg_(cfg) {}
  std::shared_ptr<const FrontEnd> get(const AudioClip &clip) {
    const auto key = fingerprint(clip);
    std::lock_guard lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto fe = std::make_shared<const FrontEnd>(compute_front_end(clip, cfg_));
    cache_.emplace(key, fe);
    return fe;
  }

 private:
  FrontEndConfig cfg_;
  std::mutex mu_;
  std::map<std::uint64_t, std::shared_ptr<const FrontEnd>> cache_;
};

class PipelineSystems : public TrainedSystems {
 public:
  PipelineSystems(ModelBundle bundle, std::shared_ptr<FrontEndCache> cache)
      : bundle_(std::move(bundle)), cache_(std::move(cache)) {}

  SystemOutput run(System system, const LabeledScene &test,
                   std::span<const CountWindow> windows) override {
    const Analysis &a = analysis(test.audio);
    SystemOutput out;
    if (system == System::hmm || system == System::combined) {
      out.transcript = detect(bundle_, a, system);
      const auto cal = bundle_.calibration[system];
      for (const auto &w : windows)
        out.counts.push_back(
            hmm_count(*out.transcript, w.start_seconds, w.end_seconds, cal));
      return out;
    }
    if (transcribes(system)) out.transcript = detect(bundle_, a, system);
    out.counts = count(bundle_, a, system, windows);
    return out;
  }

 private:
  const Analysis &analysis(const AudioClip &clip) {
    const auto key = fingerprint(clip);
    auto it = analyses_.find(key);
    if (it == analyses_.end())
      it = analyses_
               .emplace(key, analyse(bundle_, cache_->get(clip),
                                     clip.duration_seconds()))
               .first;
    return it->second;
  }

  ModelBundle bundle_;
  std::shared_ptr<FrontEndCache> cache_;
  std::map<std::uint64_t, Analysis> analyses_;
};

}  // namespace

Trainer pipeline_trainer(const TrainConfig &cfg) {
  auto cache = std::make_shared<FrontEndCache>(cfg.front_end);
  return [cfg, cache](const LabeledScene &train) -> std::unique_ptr<TrainedSystems> {
    const auto fe = cache->get(train.audio);
    auto bundle = train_bundle(std::span(&train, 1), std::span(fe.get(), 1), cfg);
    return std::make_unique<PipelineSystems>(std::move(bundle), cache);
  };
}

std::optional<CvSummary> CvReport::summary(System system, Condition condition,
                                           std::string_view metric) const {
  CvSummary s;
  double sum = 0.0;
  for (const auto &r : rows) {
    if (r.system != system || r.condition != condition || r.metric != metric)
      continue;
    if (s.n_folds == 0) s.min = s.max = r.value;
    s.min = std::min(s.min, r.value);
    s.max = std::max(s.max, r.value);
    sum += r.value;
    ++s.n_folds;
  }
  if (s.n_folds == 0) return std::nullopt;
  s.mean = sum / s.n_folds;
  return s;
}

CvReport crossvalidate(std::span<const Session> sessions, const Trainer &trainer,
                       std::span<const System> systems,
                       std::span<const Condition> conditions,
                       const CvOptions &options) {
  if (sessions.size() < 2)
    throw Error(Errc::invalid_argument, "crossvalidate: need at least two sessions");
  CvReport report;
  auto log = [&](const std::string &m) {
    if (options.log) options.log(m);
  };
  const int n = static_cast<int>(sessions.size());
  for (int fold = 0; fold < n; ++fold) {
    const Session &train = sessions[fold];
    const Session &test = sessions[(fold + 1) % n];
    std::map<bool, std::unique_ptr<TrainedSystems>> models;
    std::map<bool, std::string> train_errors;
    for (Condition cond : conditions) {
      const bool dense_train = cond == Condition::train_dense;
      const LabeledScene &test_scene =
          cond == Condition::test_dense ? test.dense : test.matched;
      const std::string where = "fold " + std::to_string(fold) + " " +
                                std::string(condition_name(cond));
      if (!models.count(dense_train) && !train_errors.count(dense_train)) {
        log(where + ": training");
        try {
          const LabeledScene &scene = dense_train ? train.dense : train.matched;
          if (scene.audio.samples.empty())
            throw Error(Errc::invalid_argument, "training recording is empty");
          models[dense_train] = trainer(scene);
        } catch (const std::exception &e) {
          train_errors[dense_train] = e.what();
        }
      }
      if (train_errors.count(dense_train)) {
        for (System s : systems)
          report.failures.push_back(where + " " + std::string(system_name(s)) +
                                    ": training failed: " + train_errors[dense_train]);
        continue;
      }
      log(where + ": testing");
      const auto windows = count_windows(test_scene.audio.duration_seconds(),
                                         options.count_window_seconds);
      const auto truth_counts = count_onsets(test_scene.truth, windows);
      for (System s : systems) {
        try {
          const SystemOutput out = models[dense_train]->run(s, test_scene, windows);
          auto add = [&](const char *metric, double v) {
            report.rows.push_back({s, cond, fold, metric, v});
          };
          if (transcribes(s) && out.transcript) {
            const PrfScore prf =
                score_transcript(*out.transcript, test_scene.truth, options.match);
            add("precision", prf.precision);
            add("recall", prf.recall);
            add("f_measure", prf.f_measure);
          }
          add("rms_count_error", rms_count_error(out.counts, truth_counts));
        } catch (const std::exception &e) {
          report.failures.push_back(where + " " + std::string(system_name(s)) + ": " +
                                    e.what());
        }
      }
    }
  }
  return report;
}

void write_results_csv(const std::string &path, const CvReport &report) {
  std::ofstream os(path);
  if (!os) throw Error(Errc::io, "cannot write " + path);
  os << "system,condition,fold,metric,value\n";
  char buf[64];
  for (const auto &r : report.rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    os << system_name(r.system) << ',' << condition_name(r.condition) << ','
       << r.fold << ',' << r.metric << ',' << buf << '\n';
  }
  if (!os) throw Error(Errc::io, "write failed: " + path);
}

CvReport read_results_csv(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::io, "cannot open " + path);
  CvReport report;
  std::string line;
  if (!std::getline(is, line) || line != "system,condition,fold,metric,value")
    throw Error(Errc::format, path + ": missing results header");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 5)
      throw Error(Errc::format, path + ":" + std::to_string(lineno) + ": expected 5 columns");
    CvRow row;
    row.system = parse_system(cells[0]);
    row.condition = parse_condition(cells[1]);
    row.metric = cells[3];
    try {
      row.fold = std::stoi(cells[2]);
      row.value = std::stod(cells[4]);
    } catch (const std::exception &) {
      throw Error(Errc::format, path + ":" + std::to_string(lineno) + ": bad number");
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string format_summary(const CvReport &report) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %-12s %-24s %-24s\n", "system", "condition",
                "f_measure [range]", "rms_count_error [range]");
  os << buf;
  for (Condition c : kAllConditions) {
    for (System s : kAllSystems) {
      const auto f = report.summary(s, c, "f_measure");
      const auto r = report.summary(s, c, "rms_count_error");
      if (!f && !r) continue;
      char fcell[48] = "-", rcell[48] = "-";
      if (f) std::snprintf(fcell, sizeof fcell, "%.3f [%.3f, %.3f]", f->mean, f->min, f->max);
      if (r) std::snprintf(rcell, sizeof rcell, "%.3f [%.3f, %.3f]", r->mean, r->min, r->max);
      std::snprintf(buf, sizeof buf, "%-10s %-12s %-24s %-24s\n",
                    std::string(system_name(s)).c_str(),
                    std::string(condition_name(c)).c_str(), fcell, rcell);
      os << buf;
    }
  }
  return os.str();
}

void write_svg_plot(const std::string &path, const CvReport &report,
                    std::string_view metric) {
  std::vector<Condition> conds;
  std::vector<System> systems;
  double top = 0.0;
  for (Condition c : kAllConditions)
    for (System s : kAllSystems)
      if (auto v = report.summary(s, c, metric)) {
        if (std::find(conds.begin(), conds.end(), c) == conds.end()) conds.push_back(c);
        if (std::find(systems.begin(), systems.end(), s) == systems.end())
          systems.push_back(s);
        top = std::max(top, v->max);
      }
  std::sort(systems.begin(), systems.end());
  if (top <= 0.0) top = 1.0;
  const double width = 720, height = 360, left = 60, bottom = 300, plot_h = 260;
  const double group_w = (width - left - 20) / std::max<std::size_t>(conds.size(), 1);
  const double bar_w = group_w * 0.8 / std::max<std::size_t>(systems.size(), 1);
  const char *colours[] = {"#1f77b4", "#aec7e8", "#d62728", "#ff9896", "#7f7f7f"};
  auto y = [&](double v) { return bottom - plot_h * v / top; };

  std::ofstream os(path);
  if (!os) throw Error(Errc::io, "cannot write " + path);
  char buf[256];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<text x=\"" << left << "\" y=\"20\">" << metric << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                left, bottom, width - 20, bottom);
  os << buf;
  for (int k = 0; k <= 4; ++k) {
    const double v = top * k / 4;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%.2f</text>\n", left - 6,
                  y(v) + 4, v);
    os << buf;
  }
  for (std::size_t g = 0; g < conds.size(); ++g) {
    const double x0 = left + g * group_w + group_w * 0.1;
    for (std::size_t i = 0; i < systems.size(); ++i) {
      const auto v = report.summary(systems[i], conds[g], metric);
      if (!v) continue;
      const double x = x0 + i * bar_w;
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"%s\"/>\n",
                    x, y(v->mean), bar_w * 0.9, bottom - y(v->mean),
                    colours[static_cast<int>(systems[i]) % 5]);
      os << buf;
      const double cx = x + bar_w * 0.45;
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                    cx, y(v->min), cx, y(v->max));
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%s</text>\n",
                  x0 + group_w * 0.4, bottom + 18,
                  std::string(condition_name(conds[g])).c_str());
    os << buf;
  }
  for (std::size_t i = 0; i < systems.size(); ++i) {
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%g\" y=\"%g\" width=\"10\" height=\"10\" fill=\"%s\"/>"
                  "<text x=\"%g\" y=\"%g\">%s</text>\n",
                  left + i * 110.0, bottom + 32, colours[static_cast<int>(systems[i]) % 5],
                  left + i * 110.0 + 14, bottom + 41,
                  std::string(system_name(systems[i])).c_str());
    os << buf;
  }
  os << "</svg>\n";
  if (!os) throw Error(Errc::io, "write failed: " + path);
}

}  // namespace odo
