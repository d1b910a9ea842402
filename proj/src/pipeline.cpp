/*
 * Copyright 2026 The multigrasp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "multigrasp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "multigrasp/error.hpp"
#include "multigrasp/kdtree.hpp"
#include "multigrasp/rng.hpp"
#include "multigrasp/util.hpp"

namespace mg {

using json = nlohmann::ordered_json;

namespace {

uint64_t child_seed(uint64_t seed, uint64_t a, uint64_t b) {
  return mix64(seed, mix64(a, b));
}

json candidate_to_json_value(const GraspCandidate& candidate) {
  return json::parse(candidate_to_json(candidate));
}

}  // namespace

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

const char* split_kind_name(SplitKind kind) {
  switch (kind) {
    case SplitKind::Random:
      return "random";
    case SplitKind::ByObject:
      return "object";
  }
  fail(ErrorCode::InvalidArgument, "unknown split kind");
}

SplitKind split_kind_from_name(const std::string& name) {
  if (name == "random") return SplitKind::Random;
  if (name == "object") return SplitKind::ByObject;
  fail(ErrorCode::InvalidArgument,
       "unknown split kind '" + name + "' (expected random|object)");
}

const char* eval_mode_name(EvalMode mode) {
  switch (mode) {
    case EvalMode::Combined:
      return "combined";
    case EvalMode::Separate:
      return "separate";
  }
  fail(ErrorCode::InvalidArgument, "unknown eval mode");
}

EvalMode eval_mode_from_name(const std::string& name) {
  if (name == "combined") return EvalMode::Combined;
  if (name == "separate") return EvalMode::Separate;
  fail(ErrorCode::InvalidArgument,
       "unknown eval mode '" + name + "' (expected combined|separate)");
}

Split make_split(const Dataset& dataset, SplitKind kind, double test_fraction,
                 uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    fail(ErrorCode::InvalidArgument, "test_fraction must lie in (0, 1)");
  }
  const int n = static_cast<int>(dataset.exemplars.size());
  if (n < 2) {
    fail(ErrorCode::EmptySplit, "a split needs at least two exemplars");
  }

  Rng rng(seed, 0x73706c6974ULL);
  Split split;
  if (kind == SplitKind::Random) {
    const std::vector<int> order = rng.sample_without_replacement(n, n);
    int n_test = static_cast<int>(
        std::llround(test_fraction * static_cast<double>(n)));
    n_test = std::clamp(n_test, 1, n - 1);
    split.test.assign(order.begin(), order.begin() + n_test);
    split.train.assign(order.begin() + n_test, order.end());
  } else {
    std::map<int, std::vector<int>> by_object;
    for (int i = 0; i < n; ++i) {
      by_object[dataset.exemplars[static_cast<size_t>(i)].object_id].push_back(
          i);
    }
    const int n_obj = static_cast<int>(by_object.size());
    if (n_obj < 2) {
      fail(ErrorCode::InvalidArgument,
           "an object split needs at least two distinct objects");
    }
    std::vector<int> object_ids;
    object_ids.reserve(by_object.size());
    for (const auto& [id, indices] : by_object) object_ids.push_back(id);
    const std::vector<int> order = rng.sample_without_replacement(n_obj, n_obj);
    int n_test_obj = static_cast<int>(
        std::llround(test_fraction * static_cast<double>(n_obj)));
    n_test_obj = std::clamp(n_test_obj, 1, n_obj - 1);
    for (int j = 0; j < n_obj; ++j) {
      const std::vector<int>& indices =
          by_object[object_ids[static_cast<size_t>(order[j])]];
      auto& side = j < n_test_obj ? split.test : split.train;
      side.insert(side.end(), indices.begin(), indices.end());
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  if (split.train.empty() || split.test.empty()) {
    fail(ErrorCode::EmptySplit, "split left one side empty");
  }
  return split;
}

void apply_split_tags(Dataset& dataset, const Split& split) {
  const int n = static_cast<int>(dataset.exemplars.size());
  for (const auto& [indices, tag] :
       {std::pair{&split.train, "train"}, std::pair{&split.test, "test"}}) {
    for (int i : *indices) {
      if (i < 0 || i >= n) {
        fail(ErrorCode::InvalidArgument,
             "split index " + std::to_string(i) + " out of range");
      }
      dataset.exemplars[static_cast<size_t>(i)].split_tag = tag;
    }
  }
}

// ---------------------------------------------------------------------------
// Split evaluation
// ---------------------------------------------------------------------------

void EvalConfig::validate() const {
  net.validate();
  train.validate();
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    fail(ErrorCode::InvalidArgument, "test_fraction must lie in (0, 1)");
  }
  if (n_seeds < 1) {
    fail(ErrorCode::InvalidArgument, "n_seeds must be at least 1");
  }
}

std::vector<TypeMetrics> metrics_from_predictions(
    const std::vector<PredictionRecord>& predictions, int n_types,
    std::vector<std::string>* warnings) {
  if (n_types < 1) {
    fail(ErrorCode::InvalidArgument, "n_types must be at least 1");
  }
  std::vector<long long> tp(static_cast<size_t>(n_types), 0);
  std::vector<long long> fp(static_cast<size_t>(n_types), 0);
  std::vector<long long> tn(static_cast<size_t>(n_types), 0);
  std::vector<long long> fn(static_cast<size_t>(n_types), 0);
  for (const PredictionRecord& rec : predictions) {
    if (rec.type < 0 || rec.type >= n_types) {
      fail(ErrorCode::InvalidArgument,
           "prediction record has type " + std::to_string(rec.type) +
               " outside [0, " + std::to_string(n_types) + ")");
    }
    const size_t t = static_cast<size_t>(rec.type);
    if (rec.predicted != 0) {
      (rec.label != 0 ? tp : fp)[t] += 1;
    } else {
      (rec.label != 0 ? fn : tn)[t] += 1;
    }
  }

  std::vector<TypeMetrics> metrics(static_cast<size_t>(n_types));
  for (int t = 0; t < n_types; ++t) {
    const size_t i = static_cast<size_t>(t);
    const long long total = tp[i] + fp[i] + tn[i] + fn[i];
    if (total == 0) {
      fail(ErrorCode::InvalidArgument,
           "no predictions for grasp type " + std::to_string(t));
    }
    TypeMetrics& m = metrics[i];
    m.accuracy = static_cast<double>(tp[i] + tn[i]) /
                 static_cast<double>(total);
    if (tp[i] + fp[i] == 0) {
      m.precision = 1.0;
      if (warnings != nullptr) {
        warnings->push_back(std::string(grasp_type_name(
                                static_cast<GraspType>(t))) +
                            ": no predicted positives; precision reported "
                            "as 1.0");
      }
    } else {
      m.precision = static_cast<double>(tp[i]) /
                    static_cast<double>(tp[i] + fp[i]);
    }
    if (tp[i] + fn[i] == 0) {
      m.recall = 1.0;
      if (warnings != nullptr) {
        warnings->push_back(std::string(grasp_type_name(
                                static_cast<GraspType>(t))) +
                            ": no positive labels; recall reported as 1.0");
      }
    } else {
      m.recall =
          static_cast<double>(tp[i]) / static_cast<double>(tp[i] + fn[i]);
    }
    m.f1 = m.precision + m.recall == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return metrics;
}

EvalReport evaluate_split(const Dataset& dataset, SplitKind split,
                          EvalMode mode, const EvalConfig& cfg,
                          uint64_t seed) {
  cfg.validate();
  if (dataset.exemplars.empty()) {
    fail(ErrorCode::EmptySplit, "dataset is empty");
  }
  if (dataset.n_types != cfg.net.n_types) {
    fail(ErrorCode::ShapeMismatch,
         "dataset has " + std::to_string(dataset.n_types) +
             " grasp types, network config expects " +
             std::to_string(cfg.net.n_types));
  }

  const PreparedDataset prepared = prepare_dataset(cfg.net, dataset);
  EvalReport report;
  report.split = split;
  report.mode = mode;
  report.n_types = cfg.net.n_types;

  for (int s = 0; s < cfg.n_seeds; ++s) {
    const uint64_t run_seed = mix64(seed, static_cast<uint64_t>(s));
    const Split sp =
        make_split(dataset, split, cfg.test_fraction, mix64(run_seed, 1));
    TrainConfig tc = cfg.train;
    tc.seed = mix64(run_seed, 2);

    SeedEval run;
    run.seed = run_seed;
    if (mode == EvalMode::Combined) {
      Model<float> model = make_model<float>(cfg.net);
      init_weights(model, mix64(run_seed, 3));
      const TrainLog log = train_combined(model, dataset, prepared, sp, tc);
      report.parameter_count = param_count(model);
      run.epoch_chosen.assign(static_cast<size_t>(cfg.net.n_types),
                              log.best_epoch);
      for (int idx : sp.test) {
        const LabeledExemplar& ex = dataset.exemplars[static_cast<size_t>(idx)];
        const std::vector<float> probs = predict_probs(
            model, prepared.groupings[static_cast<size_t>(idx)], ex.encoding);
        for (int t = 0; t < cfg.net.n_types; ++t) {
          const double p = static_cast<double>(probs[static_cast<size_t>(t)]);
          run.predictions.push_back({idx, t, p, p > 0.5 ? 1 : 0,
                                     ex.labels[static_cast<size_t>(t)]});
        }
      }
    } else {
      SeparateEnsemble ensemble = make_separate_ensemble(cfg.net);
      for (size_t t = 0; t < ensemble.members.size(); ++t) {
        init_weights(ensemble.members[t],
                     mix64(run_seed, 3 + static_cast<uint64_t>(t)));
      }
      const std::vector<TrainLog> logs =
          train_separate(ensemble, dataset, prepared, sp, tc);
      report.parameter_count = param_count(ensemble);
      for (const TrainLog& log : logs) run.epoch_chosen.push_back(log.best_epoch);
      for (int idx : sp.test) {
        const LabeledExemplar& ex = dataset.exemplars[static_cast<size_t>(idx)];
        for (int t = 0; t < cfg.net.n_types; ++t) {
          const std::vector<float> probs = predict_probs(
              ensemble.members[static_cast<size_t>(t)],
              prepared.groupings[static_cast<size_t>(idx)], ex.encoding);
          const double p = static_cast<double>(probs[static_cast<size_t>(t)]);
          run.predictions.push_back({idx, t, p, p > 0.5 ? 1 : 0,
                                     ex.labels[static_cast<size_t>(t)]});
        }
      }
    }
    run.per_type = metrics_from_predictions(run.predictions, cfg.net.n_types,
                                            &report.warnings);
    report.runs.push_back(std::move(run));
  }

  report.mean_per_type.assign(static_cast<size_t>(cfg.net.n_types), {});
  const double inv_runs = 1.0 / static_cast<double>(report.runs.size());
  for (const SeedEval& run : report.runs) {
    for (int t = 0; t < cfg.net.n_types; ++t) {
      const TypeMetrics& m = run.per_type[static_cast<size_t>(t)];
      TypeMetrics& acc = report.mean_per_type[static_cast<size_t>(t)];
      acc.accuracy += m.accuracy * inv_runs;
      acc.precision += m.precision * inv_runs;
      acc.recall += m.recall * inv_runs;
      acc.f1 += m.f1 * inv_runs;
    }
  }
  const double inv_types = 1.0 / static_cast<double>(cfg.net.n_types);
  for (const TypeMetrics& m : report.mean_per_type) {
    report.mean_overall.accuracy += m.accuracy * inv_types;
    report.mean_overall.precision += m.precision * inv_types;
    report.mean_overall.recall += m.recall * inv_types;
    report.mean_overall.f1 += m.f1 * inv_types;
  }
  return report;
}

namespace {

json metrics_to_json(const TypeMetrics& m) {
  return json{{"accuracy", m.accuracy},
              {"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1}};
}

}  // namespace

std::string format_eval_report_json(const EvalReport& report) {
  json root;
  root["split"] = split_kind_name(report.split);
  root["mode"] = eval_mode_name(report.mode);
  root["n_types"] = report.n_types;
  root["parameter_count"] = report.parameter_count;
  root["mean"] = metrics_to_json(report.mean_overall);
  json per_type = json::array();
  for (int t = 0; t < report.n_types; ++t) {
    json row = metrics_to_json(report.mean_per_type[static_cast<size_t>(t)]);
    row["type"] = grasp_type_name(static_cast<GraspType>(t));
    per_type.push_back(std::move(row));
  }
  root["mean_per_type"] = std::move(per_type);
  json runs = json::array();
  for (const SeedEval& run : report.runs) {
    json r;
    r["seed"] = run.seed;
    r["epoch_chosen"] = run.epoch_chosen;
    json rows = json::array();
    for (size_t t = 0; t < run.per_type.size(); ++t) {
      json row = metrics_to_json(run.per_type[t]);
      row["type"] = grasp_type_name(static_cast<GraspType>(t));
      rows.push_back(std::move(row));
    }
    r["per_type"] = std::move(rows);
    json preds = json::array();
    for (const PredictionRecord& p : run.predictions) {
      preds.push_back(json{{"exemplar", p.exemplar},
                           {"type", p.type},
                           {"probability", p.probability},
                           {"predicted", p.predicted},
                           {"label", p.label}});
    }
    r["predictions"] = std::move(preds);
    runs.push_back(std::move(r));
  }
  root["runs"] = std::move(runs);
  root["warnings"] = report.warnings;
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Detection
// ---------------------------------------------------------------------------

void DetectConfig::validate() const {
  if (k < 1) fail(ErrorCode::InvalidArgument, "detect k must be at least 1");
  if (!(frame_radius > 0.0)) {
    fail(ErrorCode::InvalidArgument, "frame_radius must be positive");
  }
  gripper.validate();
  if (min_region_points < 0) {
    fail(ErrorCode::InvalidArgument, "min_region_points must be >= 0");
  }
  if (input_points < 1) {
    fail(ErrorCode::InvalidArgument, "input_points must be at least 1");
  }
  if (!(region.half_x > 0.0) || !(region.half_y > 0.0) ||
      !(region.z_max > region.z_min)) {
    fail(ErrorCode::InvalidArgument, "crop region must have positive extent");
  }
}

std::vector<GraspDecision> detect(const PointCloud& cloud,
                                  const Model<float>& model, int k,
                                  const DetectConfig& cfg,
                                  const std::vector<GraspType>& allowed_types,
                                  const std::vector<Vec3>& viewpoints,
                                  uint64_t seed) {
  cfg.validate();
  if (allowed_types.empty()) {
    fail(ErrorCode::InvalidArgument, "allowed_types must not be empty");
  }
  std::set<int> seen;
  for (GraspType type : allowed_types) {
    const int t = static_cast<int>(type);
    if (t < 0 || t >= kNumGraspTypes) {
      fail(ErrorCode::InvalidArgument, "unknown grasp type in allowed_types");
    }
    if (!seen.insert(t).second) {
      fail(ErrorCode::InvalidArgument, "duplicate grasp type in allowed_types");
    }
    if (t >= model.cfg.n_types) {
      fail(ErrorCode::InvalidArgument,
           "model has no output head for grasp type " +
               std::string(grasp_type_name(type)));
    }
  }
  if (model.cfg.n_types < static_cast<int>(allowed_types.size())) {
    fail(ErrorCode::InvalidArgument,
         "model has fewer heads than allowed grasp types");
  }
  if (model.cfg.input_points != cfg.input_points) {
    fail(ErrorCode::ShapeMismatch,
         "detect config encodes " + std::to_string(cfg.input_points) +
             " points but the model expects " +
             std::to_string(model.cfg.input_points));
  }

  const CandidateSet set = generate(cloud, k, seed, viewpoints,
                                    cfg.frame_radius);
  const SpatialIndex index = SpatialIndex::build(cloud);
  const JointState open = JointState::open();

  struct Entry {
    size_t ci;
    GraspType type;
    double probability;
  };
  std::vector<Entry> entries;

  std::vector<GraspType> feasible;
  for (size_t ci = 0; ci < set.candidates.size(); ++ci) {
    const GraspCandidate& candidate = set.candidates[ci];
    feasible.clear();
    for (GraspType type : allowed_types) {
      const GripperPose pose = standoff_pose(candidate, type, cfg.gripper);
      const BodySet bodies = body_set(pose, type, cfg.gripper, open);
      if (collides(bodies, index, cfg.gripper.collision_margin)) continue;
      if (count_region_points(bodies, index) < cfg.min_region_points) continue;
      feasible.push_back(type);
    }
    if (feasible.empty()) continue;

    GraspEncoding encoding;
    try {
      encoding = encode(cloud, candidate, cfg.region, cfg.input_points,
                        mix64(seed, static_cast<uint64_t>(ci)));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::EmptyRegion) continue;
      throw;
    }
    const Grouping grouping = compute_grouping(model.cfg, encoding);
    const std::vector<float> probs = predict_probs(model, grouping, encoding);
    for (GraspType type : feasible) {
      entries.push_back(
          {ci, type,
           static_cast<double>(probs[static_cast<size_t>(type)])});
    }
  }

  if (entries.empty()) {
    fail(ErrorCode::NoFeasibleGrasp,
         "none of the " + std::to_string(set.candidates.size()) +
             " candidates kept a collision-free, populated grasp type");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) {
              if (a.probability != b.probability) {
                return a.probability > b.probability;
              }
              if (a.ci != b.ci) return a.ci < b.ci;
              return static_cast<int>(a.type) < static_cast<int>(b.type);
            });

  std::vector<GraspDecision> decisions;
  decisions.reserve(entries.size());
  for (const Entry& e : entries) {
    decisions.push_back({set.candidates[e.ci], e.type, e.probability});
  }
  return decisions;
}

std::string format_decisions_json(
    const std::vector<GraspDecision>& decisions) {
  json root;
  json rows = json::array();
  for (const GraspDecision& d : decisions) {
    rows.push_back(json{{"type", grasp_type_name(d.type)},
                        {"probability", d.probability},
                        {"pose", candidate_to_json_value(d.pose)}});
  }
  root["decisions"] = std::move(rows);
  return root.dump(2) + "\n";
}

std::vector<GraspDecision> parse_decisions_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaViolation,
         std::string("decisions document is not valid JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("decisions") ||
      !root["decisions"].is_array()) {
    fail(ErrorCode::SchemaViolation,
         "decisions document must be an object with a 'decisions' array");
  }
  std::vector<GraspDecision> decisions;
  for (const json& row : root["decisions"]) {
    if (!row.is_object() || !row.contains("type") ||
        !row.contains("probability") || !row.contains("pose") ||
        !row["type"].is_string() || !row["probability"].is_number()) {
      fail(ErrorCode::SchemaViolation,
           "each decision needs a type name, a probability, and a pose");
    }
    GraspDecision d;
    d.type = grasp_type_from_name(row["type"].get<std::string>());
    d.probability = row["probability"].get<double>();
    d.pose = candidate_from_json(row["pose"].dump());
    decisions.push_back(std::move(d));
  }
  return decisions;
}

// ---------------------------------------------------------------------------
// Reachability stub
// ---------------------------------------------------------------------------

void WorkspaceConfig::validate() const {
  if (!(min.x < max.x && min.y < max.y && min.z < max.z)) {
    fail(ErrorCode::InvalidArgument, "workspace box must have positive extent");
  }
  if (!(min_elevation_deg >= 0.0 && min_elevation_deg <= 90.0)) {
    fail(ErrorCode::InvalidArgument,
         "min_elevation_deg must lie in [0, 90]");
  }
}

bool pose_reachable(const GripperPose& pose, const WorkspaceConfig& cfg) {
  const Vec3& p = pose.palm_center;
  if (p.x < cfg.min.x || p.x > cfg.max.x || p.y < cfg.min.y ||
      p.y > cfg.max.y || p.z < cfg.min.z || p.z > cfg.max.z) {
    return false;
  }
  // The approach must descend by at least the configured elevation; a level
  // or upward approach would have to come from under the table edge.
  const double max_z = -std::sin(deg_to_rad(cfg.min_elevation_deg)) + 1e-12;
  return pose.approach().z <= max_z;
}

// ---------------------------------------------------------------------------
// Clutter scenes
// ---------------------------------------------------------------------------

void ClutterConfig::validate() const {
  if (cluster_count < 0 || ring_count < 0 ||
      cluster_count + ring_count < 1) {
    fail(ErrorCode::InvalidArgument,
         "a clutter scene needs at least one object");
  }
  if (!(cluster_radius > 0.0) || !(ring_radius > 0.0)) {
    fail(ErrorCode::InvalidArgument, "clutter radii must be positive");
  }
  if (clearance < 0.0) {
    fail(ErrorCode::InvalidArgument, "clearance must be non-negative");
  }
  if (cameras < 1 || cameras > 255) {
    fail(ErrorCode::InvalidArgument, "cameras must lie in [1, 255]");
  }
  if (!(camera_radius > 0.0)) {
    fail(ErrorCode::InvalidArgument, "camera_radius must be positive");
  }
  if (!(camera_elevation_deg > 0.0 && camera_elevation_deg < 90.0)) {
    fail(ErrorCode::InvalidArgument,
         "camera_elevation_deg must lie in (0, 90)");
  }
}

namespace {

bool is_identity_rotation(const Quatern& q) {
  return std::fabs(std::fabs(q.w) - 1.0) < 1e-12;
}

/// Radius of the circumscribed vertical cylinder of a shape about its local
/// origin; used as a conservative footprint for collision-free placement.
double footprint_radius(const Shape& shape) {
  double best = 0.0;
  for (const Primitive& part : shape.parts) {
    const double off = std::hypot(part.center.x, part.center.y);
    double r = 0.0;
    if (!is_identity_rotation(part.rotation)) {
      r = part.dims.norm();
    } else {
      switch (part.kind) {
        case PrimitiveKind::Box:
          r = std::hypot(part.dims.x, part.dims.y);
          break;
        case PrimitiveKind::Cylinder:
        case PrimitiveKind::Sphere:
          r = part.dims.x;
          break;
      }
    }
    best = std::max(best, off + r);
  }
  return best;
}

const Shape& catalog_shape(const ShapeSet& catalog, const std::string& id) {
  const Shape* shape = catalog.find(id);
  if (shape == nullptr) {
    fail(ErrorCode::InvalidArgument,
         "clutter pool references unknown shape '" + id + "'");
  }
  return *shape;
}

}  // namespace

Scene make_clutter_scene(const ShapeSet& catalog, const ClutterConfig& cfg,
                         uint64_t seed) {
  cfg.validate();

  std::vector<std::string> cluster_pool = cfg.cluster_ids;
  std::vector<std::string> ring_pool = cfg.ring_ids;
  if (cluster_pool.empty()) {
    for (const Shape& shape : catalog.shapes) {
      if (shape.size_class != SizeClass::Large) cluster_pool.push_back(shape.id);
    }
  }
  if (ring_pool.empty()) {
    for (const Shape& shape : catalog.shapes) {
      if (shape.size_class == SizeClass::Large) ring_pool.push_back(shape.id);
    }
  }
  if (cfg.cluster_count > 0 && cluster_pool.empty()) {
    fail(ErrorCode::InvalidArgument, "no shapes available for the cluster");
  }
  if (cfg.ring_count > 0 && ring_pool.empty()) {
    fail(ErrorCode::InvalidArgument, "no shapes available for the ring");
  }

  Rng rng(seed, 0x636c7574746572ULL);
  Scene scene;
  scene.table_height = 0.0;

  struct Placed {
    Vec3 position;
    double radius;
  };
  std::vector<Placed> placed;
  const auto clear_at = [&](const Vec3& pos, double r) {
    for (const Placed& p : placed) {
      const double need = p.radius + r + cfg.clearance;
      if (dist2(pos, p.position) < need * need) return false;
    }
    return true;
  };
  const auto occupied_rim = [&] {
    double rim = 0.0;
    for (const Placed& p : placed) {
      rim = std::max(rim, std::hypot(p.position.x, p.position.y) + p.radius);
    }
    return rim;
  };
  const auto add_object = [&](const std::string& id, const Vec3& pos) {
    const double yaw = rng.uniform(0.0, 2.0 * kPi);
    ObjectInstance instance;
    instance.shape_id = id;
    instance.pose.rotation = Quatern::from_axis_angle({0.0, 0.0, 1.0}, yaw);
    instance.pose.translation = pos;
    scene.objects.push_back(std::move(instance));
  };

  for (int i = 0; i < cfg.cluster_count; ++i) {
    const std::string& id =
        cluster_pool[rng.below(static_cast<uint32_t>(cluster_pool.size()))];
    const double r = footprint_radius(catalog_shape(catalog, id));
    Vec3 pos;
    bool ok = false;
    for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
      const double d = cfg.cluster_radius * std::sqrt(rng.uniform());
      const double a = rng.uniform(0.0, 2.0 * kPi);
      pos = {d * std::cos(a), d * std::sin(a), 0.0};
      ok = clear_at(pos, r);
    }
    if (!ok) {
      // Deterministic fallback: just outside everything already placed, at a
      // seeded angle. Every placed footprint lies within the rim, so the
      // separation is guaranteed.
      const double a = rng.uniform(0.0, 2.0 * kPi);
      const double d = occupied_rim() + r + cfg.clearance;
      pos = {d * std::cos(a), d * std::sin(a), 0.0};
    }
    placed.push_back({pos, r});
    add_object(id, pos);
  }

  for (int j = 0; j < cfg.ring_count; ++j) {
    const std::string& id =
        ring_pool[rng.below(static_cast<uint32_t>(ring_pool.size()))];
    const double r = footprint_radius(catalog_shape(catalog, id));
    const double a = 2.0 * kPi * static_cast<double>(j) /
                         static_cast<double>(cfg.ring_count) +
                     rng.uniform(-0.3, 0.3);
    double d = cfg.ring_radius;
    const double d_stop = occupied_rim() + r + cfg.clearance;
    Vec3 pos{d * std::cos(a), d * std::sin(a), 0.0};
    while (!clear_at(pos, r) && d < d_stop) {
      d = std::min(d + 0.01, d_stop);
      pos = {d * std::cos(a), d * std::sin(a), 0.0};
    }
    placed.push_back({pos, r});
    add_object(id, pos);
  }

  const double elev = deg_to_rad(cfg.camera_elevation_deg);
  const double horizontal = cfg.camera_radius * std::cos(elev);
  const double height = cfg.camera_radius * std::sin(elev);
  for (int c = 0; c < cfg.cameras; ++c) {
    const double az =
        2.0 * kPi * static_cast<double>(c) / static_cast<double>(cfg.cameras) +
        0.4;
    CameraPose camera;
    camera.position = {horizontal * std::cos(az), horizontal * std::sin(az),
                       height};
    camera.look_at = {0.0, 0.0, 0.0};
    scene.cameras.push_back(camera);
  }
  return scene;
}

// ---------------------------------------------------------------------------
// Clutter-clearing trials
// ---------------------------------------------------------------------------

void TrialConfig::validate() const {
  detect.validate();
  label.validate();
  workspace.validate();
  if (top_reachable < 1) {
    fail(ErrorCode::InvalidArgument, "top_reachable must be at least 1");
  }
  if (regenerations < 0) {
    fail(ErrorCode::InvalidArgument, "regenerations must be >= 0");
  }
  if (samples_per_view < 1) {
    fail(ErrorCode::InvalidArgument, "samples_per_view must be at least 1");
  }
  if (table_removal_threshold < 0.0) {
    fail(ErrorCode::InvalidArgument,
         "table_removal_threshold must be non-negative");
  }
  if (repeat_failure_limit < 1) {
    fail(ErrorCode::InvalidArgument, "repeat_failure_limit must be >= 1");
  }
  if (no_reachable_limit < 1) {
    fail(ErrorCode::InvalidArgument, "no_reachable_limit must be >= 1");
  }
}

TrialReport run_trial(const Scene& scene, const ShapeSet& catalog,
                      const Model<float>& model,
                      const std::vector<GraspType>& ablation,
                      const TrialConfig& cfg, uint64_t seed) {
  cfg.validate();
  if (ablation.empty()) {
    fail(ErrorCode::InvalidArgument, "ablation must allow at least one type");
  }
  if (scene.cameras.empty()) {
    fail(ErrorCode::InvalidArgument, "trial scene has no cameras");
  }

  TrialReport report;
  report.objects_total = static_cast<int>(scene.objects.size());

  std::vector<int> alive;
  for (int i = 0; i < report.objects_total; ++i) alive.push_back(i);

  std::vector<Vec3> viewpoints;
  for (const CameraPose& camera : scene.cameras) {
    viewpoints.push_back(camera.position);
  }

  const int round_budget =
      3 * report.objects_total * kNumGraspTypes + cfg.no_reachable_limit;
  int rounds = 0;
  int no_reach_streak = 0;
  struct FailureKey {
    int object = -1;
    int type = -1;
    int failure = -1;
    bool operator==(const FailureKey& o) const {
      return object == o.object && type == o.type && failure == o.failure;
    }
  };
  FailureKey last_failure;
  int failure_streak = 0;

  while (true) {
    if (alive.empty()) {
      report.termination = "cleared";
      break;
    }
    if (rounds >= round_budget) {
      report.termination = "attempt_budget";
      break;
    }
    ++rounds;
    const uint64_t round_seed = mix64(seed, static_cast<uint64_t>(rounds));

    Scene current;
    current.table_height = scene.table_height;
    current.cameras = scene.cameras;
    for (int oi : alive) {
      current.objects.push_back(scene.objects[static_cast<size_t>(oi)]);
    }

    PointCloud cloud;
    bool have_cloud = false;
    try {
      cloud = capture_views(current, catalog, cfg.samples_per_view,
                            child_seed(round_seed, 0, 0))
                  .above_plane(current.table_height,
                               cfg.table_removal_threshold);
      have_cloud = !cloud.empty();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoVisibleSurface) throw;
    }

    GraspDecision chosen;
    bool found = false;
    if (have_cloud) {
      for (int r = 0; r <= cfg.regenerations && !found; ++r) {
        std::vector<GraspDecision> decisions;
        try {
          decisions = detect(cloud, model, cfg.detect.k << r, cfg.detect,
                             ablation, viewpoints, child_seed(round_seed, 1,
                                                              static_cast<uint64_t>(r)));
        } catch (const Error& e) {
          if (e.code() == ErrorCode::NoFeasibleGrasp ||
              e.code() == ErrorCode::InsufficientSurface ||
              e.code() == ErrorCode::EmptyCloud) {
            continue;
          }
          throw;
        }
        const size_t top = std::min(decisions.size(),
                                    static_cast<size_t>(cfg.top_reachable));
        for (size_t i = 0; i < top; ++i) {
          const GripperPose pose = standoff_pose(
              decisions[i].pose, decisions[i].type, cfg.detect.gripper);
          if (pose_reachable(pose, cfg.workspace)) {
            chosen = decisions[i];
            found = true;
            break;
          }
        }
      }
    }

    if (!found) {
      GraspAttempt attempt;
      attempt.executed = false;
      attempt.note = "no reachable grasp";
      report.log.push_back(std::move(attempt));
      if (++no_reach_streak >= cfg.no_reachable_limit) {
        report.termination = "no_reachable";
        break;
      }
      continue;
    }
    no_reach_streak = 0;

    const InstancedScene instanced = instantiate_scene(current, catalog);
    const ContactSurface surface =
        sample_contact_surface(instanced, cfg.label.surface_pitch);
    const int target_current = nearest_shape(surface, chosen.pose.centroid);
    const GraspLabel label = label_candidate(chosen.pose, instanced, surface,
                                             cfg.detect.gripper, cfg.label);
    const int type_index = static_cast<int>(chosen.type);
    const FailureClass outcome =
        label.diagnostics[static_cast<size_t>(type_index)].failure;
    bool success = label.success[static_cast<size_t>(type_index)] != 0;

    GraspAttempt attempt;
    attempt.executed = true;
    attempt.pose = chosen.pose;
    attempt.type = chosen.type;
    attempt.probability = chosen.probability;
    attempt.outcome = outcome;
    if (target_current >= 0) {
      attempt.target_object = alive[static_cast<size_t>(target_current)];
      attempt.target_shape =
          instanced.shapes[static_cast<size_t>(target_current)].shape_id;
    }
    if (!success && outcome == FailureClass::MultiObject &&
        cfg.multi_object_removes) {
      success = true;
      attempt.note = "multi-object contact; target removed by policy";
    }
    attempt.success = success;
    report.log.push_back(attempt);
    ++report.attempts;

    if (success) {
      ++report.successes;
      if (target_current >= 0) {
        alive.erase(alive.begin() + target_current);
      }
      last_failure = FailureKey{};
      failure_streak = 0;
    } else {
      const FailureKey key{attempt.target_object, type_index,
                           static_cast<int>(outcome)};
      failure_streak = key == last_failure ? failure_streak + 1 : 1;
      last_failure = key;
      if (failure_streak >= cfg.repeat_failure_limit) {
        report.termination = "repeated_failure";
        break;
      }
    }
  }

  report.objects_removed =
      report.objects_total - static_cast<int>(alive.size());
  return report;
}

std::string format_trial_report_json(const TrialReport& report) {
  json root;
  root["objects_total"] = report.objects_total;
  root["objects_removed"] = report.objects_removed;
  root["removal_rate"] = report.removal_rate();
  root["attempts"] = report.attempts;
  root["successes"] = report.successes;
  root["termination"] = report.termination;
  json log = json::array();
  for (const GraspAttempt& attempt : report.log) {
    json row;
    row["executed"] = attempt.executed;
    if (attempt.executed) {
      row["pose"] = candidate_to_json_value(attempt.pose);
      row["type"] = grasp_type_name(attempt.type);
      row["probability"] = attempt.probability;
      row["target_object"] = attempt.target_object;
      row["target_shape"] = attempt.target_shape;
      row["outcome"] = failure_class_name(attempt.outcome);
      row["success"] = attempt.success;
    }
    if (!attempt.note.empty()) row["note"] = attempt.note;
    log.push_back(std::move(row));
  }
  root["log"] = std::move(log);
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Ablation benchmark
// ---------------------------------------------------------------------------

const std::vector<AblationSpec>& standard_ablations() {
  static const std::vector<AblationSpec> specs = {
      {"5Type",
       {GraspType::WidePower, GraspType::WidePrecision, GraspType::BasicPower,
        GraspType::BasicPrecision, GraspType::Pincher}},
      {"2Type", {GraspType::BasicPower, GraspType::BasicPrecision}},
      {"1Type", {GraspType::Pincher}},
  };
  return specs;
}

void BenchConfig::validate() const {
  clutter.validate();
  trial.validate();
  if (trials < 1) {
    fail(ErrorCode::InvalidArgument, "trials must be at least 1");
  }
}

BenchReport run_bench(const ShapeSet& catalog, const Model<float>& model,
                      const std::vector<AblationSpec>& ablations,
                      const BenchConfig& cfg, uint64_t seed) {
  cfg.validate();
  if (ablations.empty()) {
    fail(ErrorCode::InvalidArgument, "at least one ablation is required");
  }

  std::vector<Scene> scenes;
  scenes.reserve(static_cast<size_t>(cfg.trials));
  for (int i = 0; i < cfg.trials; ++i) {
    scenes.push_back(make_clutter_scene(catalog, cfg.clutter,
                                        mix64(seed, static_cast<uint64_t>(i))));
  }

  BenchReport report;
  for (const AblationSpec& spec : ablations) {
    AblationResult result;
    result.name = spec.name;
    double removal_sum = 0.0;
    for (int i = 0; i < cfg.trials; ++i) {
      // The trial seed depends only on the scene index, so every ablation
      // replays the identical captures and candidate draws: the comparison
      // is paired.
      TrialReport trial =
          run_trial(scenes[static_cast<size_t>(i)], catalog, model, spec.types,
                    cfg.trial, child_seed(seed, 1, static_cast<uint64_t>(i)));
      removal_sum += trial.removal_rate();
      result.attempts += trial.attempts;
      result.successes += trial.successes;
      result.trials.push_back(std::move(trial));
    }
    result.mean_removal_rate = removal_sum / static_cast<double>(cfg.trials);
    report.ablations.push_back(std::move(result));
  }
  return report;
}

std::string format_bench_report_json(const BenchReport& report) {
  json root;
  json ablations = json::array();
  for (const AblationResult& result : report.ablations) {
    json row;
    row["name"] = result.name;
    row["mean_removal_rate"] = result.mean_removal_rate;
    row["attempts"] = result.attempts;
    row["successes"] = result.successes;
    json trials = json::array();
    for (const TrialReport& trial : result.trials) {
      trials.push_back(json::parse(format_trial_report_json(trial)));
    }
    row["trials"] = std::move(trials);
    ablations.push_back(std::move(row));
  }
  root["ablations"] = std::move(ablations);
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Visualization
// ---------------------------------------------------------------------------

std::string render_decisions_ply(const PointCloud& cloud,
                                 const std::vector<GraspDecision>& decisions,
                                 const RegionBox& region) {
  const auto in_region = [&](const GraspDecision& d, const Vec3& p) {
    const Vec3 local = d.pose.orientation.conjugate().rotate(p -
                                                             d.pose.centroid);
    return std::fabs(local.x) <= region.half_x &&
           std::fabs(local.y) <= region.half_y && local.z >= region.z_min &&
           local.z <= region.z_max;
  };

  std::ostringstream out;
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
      << "\nproperty double x\nproperty double y\nproperty double z\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      << "end_header\n";
  for (size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.point(i);
    int red = 150, green = 150, blue = 150;
    for (size_t d = 0; d < decisions.size(); ++d) {
      if (!in_region(decisions[d], p)) continue;
      if (d == 0) {
        red = 40;
        green = 220;
        blue = 40;
      } else {
        red = 120;
        green = 190;
        blue = 120;
      }
      break;
    }
    out << format_double(p.x) << ' ' << format_double(p.y) << ' '
        << format_double(p.z) << ' ' << red << ' ' << green << ' ' << blue
        << '\n';
  }
  return out.str();
}

}  // namespace mg
