// odo/src/bundle.cpp

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

#include "odo/bundle.hpp"

#include <json.hpp>

#include "odo/error.hpp"
#include "odo/io.hpp"

namespace odo {

using json = nlohmann::ordered_json;

namespace {

json vec(const Eigen::VectorXd &v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd to_vec(const json &j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), Index(v.size()));
}

json mat(const Eigen::MatrixXd &m) {
  std::vector<double> flat;
  flat.reserve(m.size());
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

Eigen::MatrixXd to_mat(const json &j) {
  const Index rows = j.at("rows").get<Index>(), cols = j.at("cols").get<Index>();
  const auto flat = j.at("data").get<std::vector<double>>();
  if (Index(flat.size()) != rows * cols)
    throw Error(Errc::format, "bundle: matrix data does not match its shape");
  Eigen::MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = flat[r * cols + c];
  return m;
}

json geometry(const PatchGeometry &g) { return {g.before, g.after}; }
PatchGeometry to_geometry(const json &j) {
  return {j.at(0).get<Index>(), j.at(1).get<Index>()};
}

json config_json(const TrainConfig &c) {
  const auto &f = c.front_end;
  return {
      {"front_end",
       {{"frame_len", f.frame_len},
        {"hop", f.hop},
        {"band_lo_hz", f.band_lo_hz},
        {"band_hi_hz", f.band_hi_hz},
        {"median_window_seconds", f.median_window_seconds},
        {"median_clamp", f.median_clamp},
        {"detector_pool", f.detector_pool},
        {"hmm_pool", f.hmm_pool},
        {"detector_geometry", geometry(f.detector_geometry)},
        {"hmm_geometry", geometry(f.hmm_geometry)}}},
      {"forest",
       {{"n_trees", c.forest.n_trees},
        {"max_depth", c.forest.max_depth},
        {"min_samples_split", c.forest.min_samples_split},
        {"min_samples_leaf", c.forest.min_samples_leaf},
        {"max_features", c.forest.max_features},
        {"bootstrap", c.forest.bootstrap}}},
      {"negative_ratio", c.negative_ratio},
      {"sharpener_window", c.sharpener_window},
      {"sharpener_source",
       c.sharpener_source == SharpenerSource::in_sample ? "in_sample" : "out_of_bag"},
      {"prior_components", c.prior_components},
      {"prior_widen", c.prior_widen},
      {"flat_prior", c.flat_prior},
      {"onset_tolerance_seconds", c.match.onset_tolerance_seconds},
      {"duration_ratio_tolerance", c.match.duration_ratio_tolerance},
      {"count_window_seconds", c.count_window_seconds},
      {"train_hmm", c.train_hmm},
      {"hmm",
       {{"n_components", c.hmm.n_components},
        {"variance_floor", c.hmm.variance_floor},
        {"tolerance", c.hmm.tolerance},
        {"max_iterations", c.hmm.max_iterations},
        {"max_frames_per_state", c.hmm.max_frames_per_state}}},
      {"pairing", c.pairing == PairingOrder::fifo ? "fifo" : "lifo"},
      {"seed", c.seed}};
}

TrainConfig to_config(const json &j) {
  TrainConfig c;
  const json &f = j.at("front_end");
  c.front_end.frame_len = f.at("frame_len");
  c.front_end.hop = f.at("hop");
  c.front_end.band_lo_hz = f.at("band_lo_hz");
  c.front_end.band_hi_hz = f.at("band_hi_hz");
  c.front_end.median_window_seconds = f.at("median_window_seconds");
  c.front_end.median_clamp = f.at("median_clamp");
  c.front_end.detector_pool = f.at("detector_pool");
  c.front_end.hmm_pool = f.at("hmm_pool");
  c.front_end.detector_geometry = to_geometry(f.at("detector_geometry"));
  c.front_end.hmm_geometry = to_geometry(f.at("hmm_geometry"));
  const json &t = j.at("forest");
  c.forest.n_trees = t.at("n_trees");
  c.forest.max_depth = t.at("max_depth");
  c.forest.min_samples_split = t.at("min_samples_split");
  c.forest.min_samples_leaf = t.at("min_samples_leaf");
  c.forest.max_features = t.at("max_features");
  c.forest.bootstrap = t.at("bootstrap");
  c.negative_ratio = j.at("negative_ratio");
  c.sharpener_window = j.at("sharpener_window");
  c.sharpener_source = j.at("sharpener_source") == "in_sample"
                           ? SharpenerSource::in_sample
                           : SharpenerSource::out_of_bag;
  c.prior_components = j.at("prior_components");
  c.prior_widen = j.at("prior_widen");
  c.flat_prior = j.at("flat_prior");
  c.match.onset_tolerance_seconds = j.at("onset_tolerance_seconds");
  c.match.duration_ratio_tolerance = j.at("duration_ratio_tolerance");
  c.count_window_seconds = j.at("count_window_seconds");
  c.train_hmm = j.at("train_hmm");
  const json &h = j.at("hmm");
  c.hmm.n_components = h.at("n_components");
  c.hmm.variance_floor = h.at("variance_floor");
  c.hmm.tolerance = h.at("tolerance");
  c.hmm.max_iterations = h.at("max_iterations");
  c.hmm.max_frames_per_state = h.at("max_frames_per_state");
  c.pairing = j.at("pairing") == "fifo" ? PairingOrder::fifo : PairingOrder::lifo;
  c.seed = j.at("seed");
  return c;
}

json forest_json(const ForestModel &m) {
  json trees = json::array();
  for (const auto &tree : m.trees) {
    std::vector<std::int32_t> feature, left, right;
    std::vector<float> threshold;
    std::vector<double> value;
    for (const auto &n : tree.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      value.push_back(n.value);
    }
    trees.push_back({{"feature", feature},
                     {"threshold", threshold},
                     {"left", left},
                     {"right", right},
                     {"value", value}});
  }
  return {{"feature_dim", m.feature_dim}, {"trees", trees}};
}

ForestModel to_forest(const json &j, const ForestParams &params) {
  ForestModel m;
  m.params = params;
  m.feature_dim = j.at("feature_dim");
  for (const json &t : j.at("trees")) {
    const auto feature = t.at("feature").get<std::vector<std::int32_t>>();
    const auto threshold = t.at("threshold").get<std::vector<float>>();
    const auto left = t.at("left").get<std::vector<std::int32_t>>();
    const auto right = t.at("right").get<std::vector<std::int32_t>>();
    const auto value = t.at("value").get<std::vector<double>>();
    const std::size_t n = feature.size();
    if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n ||
        value.size() != n)
      throw Error(Errc::format, "bundle: malformed tree");
    RegressionTree tree;
    for (std::size_t i = 0; i < n; ++i) {
      if (feature[i] >= m.feature_dim ||
          (feature[i] >= 0 && (left[i] <= std::int32_t(i) || right[i] <= std::int32_t(i) ||
                               left[i] >= std::int32_t(n) || right[i] >= std::int32_t(n))))
        throw Error(Errc::format, "bundle: inconsistent tree node");
      tree.nodes.push_back({feature[i], threshold[i], left[i], right[i], value[i]});
    }
    m.trees.push_back(std::move(tree));
  }
  return m;
}

json sharpener_json(const SharpenerModel &s) {
  return {{"weights", vec(s.weights)}, {"bias", s.bias}};
}

SharpenerModel to_sharpener(const json &j) {
  SharpenerModel s;
  s.weights = to_vec(j.at("weights"));
  s.bias = j.at("bias");
  if (s.window_len() % 2 == 0)
    throw Error(Errc::format, "bundle: sharpener window must be odd");
  return s;
}

json prior_json(const DurationPrior &p) {
  json comps = json::array();
  for (const auto &c : p.components)
    comps.push_back({c.weight, c.mean_seconds, c.std_seconds});
  return {{"kind", p.kind == PriorKind::gmm ? "gmm" : "flat"},
          {"components", comps},
          {"tau_min", p.tau_min},
          {"tau_max", p.tau_max},
          {"hop_seconds", p.hop_seconds},
          {"pmf", vec(p.pmf)}};
}

DurationPrior to_prior(const json &j) {
  DurationPrior p;
  p.kind = j.at("kind") == "gmm" ? PriorKind::gmm : PriorKind::flat;
  for (const json &c : j.at("components"))
    p.components.push_back({c.at(0).get<double>(), c.at(1).get<double>(),
                            c.at(2).get<double>()});
  p.tau_min = j.at("tau_min");
  p.tau_max = j.at("tau_max");
  p.hop_seconds = j.at("hop_seconds");
  p.pmf = to_vec(j.at("pmf"));
  if (p.tau_min < 1 || p.tau_max < p.tau_min || p.pmf.size() != p.n_taus())
    throw Error(Errc::format, "bundle: inconsistent duration prior");
  return p;
}

json hmm_json(const HmmModel &m) {
  json gmms = json::array();
  for (const auto &g : m.state_gmms)
    gmms.push_back({{"weights", vec(g.weights)},
                    {"means", mat(g.means)},
                    {"variances", mat(g.variances)}});
  std::vector<bool> present(m.state_present.begin(), m.state_present.end());
  return {{"k_max", m.k_max},
          {"expanded", m.expanded},
          {"obs_dim", m.obs_dim},
          {"transitions", mat(m.transitions)},
          {"initial", vec(m.initial)},
          {"state_present", present},
          {"state_gmms", gmms}};
}

HmmModel to_hmm(const json &j) {
  HmmModel m;
  m.k_max = j.at("k_max");
  m.expanded = j.at("expanded");
  m.obs_dim = j.at("obs_dim");
  m.transitions = to_mat(j.at("transitions"));
  m.initial = to_vec(j.at("initial"));
  m.state_present = j.at("state_present").get<std::vector<bool>>();
  for (const json &g : j.at("state_gmms")) {
    DiagGmm gmm;
    gmm.weights = to_vec(g.at("weights"));
    gmm.means = to_mat(g.at("means"));
    gmm.variances = to_mat(g.at("variances"));
    m.state_gmms.push_back(std::move(gmm));
  }
  const Index s = (m.k_max + 1) * (m.expanded ? 4 : 1);
  if (m.transitions.rows() != s || m.transitions.cols() != s ||
      m.initial.size() != s || Index(m.state_gmms.size()) != s ||
      Index(m.state_present.size()) != s)
    throw Error(Errc::format, "bundle: HMM state count is inconsistent");
  for (Index i = 0; i < s; ++i)
    if (m.state_present[i] && m.state_gmms[i].dim() != m.obs_dim)
      throw Error(Errc::format, "bundle: HMM observation dimension is inconsistent");
  return m;
}

json calibration_json(const Calibrations &c) {
  json out = json::object();
  for (System s : kAllSystems) out[std::string(system_name(s))] = c[s].factor;
  return out;
}

}  // namespace

std::string serialize_bundle(const ModelBundle &b) {
  json j;
  j["schema"] = kBundleSchema;
  j["version"] = b.version;
  j["sample_rate"] = b.sample_rate;
  j["config"] = config_json(b.config);
  j["onset_forest"] = forest_json(b.onset_forest);
  j["offset_forest"] = forest_json(b.offset_forest);
  j["onset_sharpener"] = sharpener_json(b.onset_sharpener);
  j["offset_sharpener"] = sharpener_json(b.offset_sharpener);
  j["negatives_kept"] = b.negatives_kept;
  j["prior"] = prior_json(b.prior);
  j["flat_prior"] = prior_json(b.flat);
  j["threshold"] = b.threshold;
  j["flat_threshold"] = b.flat_threshold;
  j["calibration"] = calibration_json(b.calibration);
  j["hmm"] = b.hmm ? hmm_json(*b.hmm) : json(nullptr);
  j["combined"] = b.combined ? hmm_json(*b.combined) : json(nullptr);
  return j.dump() + "\n";
}

ModelBundle deserialize_bundle(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw Error(Errc::format, std::string("bundle: not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("schema", "") != kBundleSchema)
    throw Error(Errc::format, "bundle: missing schema id '" + std::string(kBundleSchema) + "'");
  const int version = j.value("version", -1);
  if (version != ModelBundle::kVersion)
    throw Error(Errc::format, "bundle: unsupported version " + std::to_string(version));
  try {
    ModelBundle b;
    b.version = version;
    b.sample_rate = j.at("sample_rate");
    b.config = to_config(j.at("config"));
    b.onset_forest = to_forest(j.at("onset_forest"), b.config.forest);
    b.offset_forest = to_forest(j.at("offset_forest"), b.config.forest);
    b.onset_sharpener = to_sharpener(j.at("onset_sharpener"));
    b.offset_sharpener = to_sharpener(j.at("offset_sharpener"));
    b.negatives_kept = j.at("negatives_kept");
    b.prior = to_prior(j.at("prior"));
    b.flat = to_prior(j.at("flat_prior"));
    b.threshold = j.at("threshold");
    b.flat_threshold = j.at("flat_threshold");
    for (System s : kAllSystems)
      b.calibration[s].factor = j.at("calibration").at(std::string(system_name(s)));
    if (!j.at("hmm").is_null()) b.hmm = to_hmm(j.at("hmm"));
    if (!j.at("combined").is_null()) b.combined = to_hmm(j.at("combined"));
    if (b.onset_forest.feature_dim != b.offset_forest.feature_dim)
      throw Error(Errc::format, "bundle: onset and offset detectors disagree on width");
    if (b.hmm && b.combined && b.combined->obs_dim != b.hmm->obs_dim + 2)
      throw Error(Errc::format, "bundle: combined HMM width is inconsistent");
    return b;
  } catch (const json::exception &e) {
    throw Error(Errc::format, std::string("bundle: ") + e.what());
  }
}

void save_bundle(const std::string &path, const ModelBundle &bundle) {
  write_text(path, serialize_bundle(bundle));
}

ModelBundle load_bundle(const std::string &path) {
  return deserialize_bundle(read_text(path));
}

}  // namespace odo
