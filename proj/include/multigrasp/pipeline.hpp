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
#ifndef MULTIGRASP_PIPELINE_HPP
#define MULTIGRASP_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "multigrasp/candidates.hpp"
#include "multigrasp/cloud.hpp"
#include "multigrasp/dataset.hpp"
#include "multigrasp/encoding.hpp"
#include "multigrasp/gripper.hpp"
#include "multigrasp/net.hpp"
#include "multigrasp/oracle.hpp"
#include "multigrasp/scene.hpp"
#include "multigrasp/train.hpp"

namespace mg {

// ---------------------------------------------------------------------------
// Train/test splits
// ---------------------------------------------------------------------------

enum class SplitKind {
  /// Test exemplars drawn uniformly from the whole dataset.
  Random,
  /// Whole objects held out: every exemplar of a test object is a test
  /// exemplar, so the evaluation measures generalization to unseen shapes.
  ByObject,
};

const char* split_kind_name(SplitKind kind);
SplitKind split_kind_from_name(const std::string& name);

enum class EvalMode {
  /// One network scoring all grasp types from a shared embedding.
  Combined,
  /// One independently trained network per grasp type.
  Separate,
};

const char* eval_mode_name(EvalMode mode);
EvalMode eval_mode_from_name(const std::string& name);

/// Builds a seeded train/test split. Random: a shuffled `test_fraction`
/// share of the exemplars (at least one on each side). ByObject: whole
/// objects are drawn until they hold `test_fraction` of the objects (at
/// least one object, never all). Throws InvalidArgument for a fraction
/// outside (0, 1) (or an object split over fewer than two objects) and
/// EmptySplit when either side would end up empty.
Split make_split(const Dataset& dataset, SplitKind kind, double test_fraction,
                 uint64_t seed);

/// Stamps "train"/"test" tags onto the exemplars named by `split`.
void apply_split_tags(Dataset& dataset, const Split& split);

// ---------------------------------------------------------------------------
// Split evaluation
// ---------------------------------------------------------------------------

struct TypeMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// One thresholded test-set prediction: probability > 0.5 predicts success.
struct PredictionRecord {
  int exemplar = -1;  // index into the dataset
  int type = -1;      // grasp type row
  double probability = 0.0;
  int predicted = 0;
  int label = 0;
};

/// One training run (one seed) of evaluate_split.
struct SeedEval {
  uint64_t seed = 0;
  /// Epoch whose weights produced the reported metrics, per type. Combined
  /// models pick one epoch (highest mean test accuracy across types), so all
  /// entries agree; separate ensembles pick each type's own best epoch.
  std::vector<int> epoch_chosen;
  std::vector<TypeMetrics> per_type;
  /// Raw thresholded test-set predictions the metrics were computed from.
  std::vector<PredictionRecord> predictions;
};

struct EvalReport {
  SplitKind split = SplitKind::Random;
  EvalMode mode = EvalMode::Combined;
  int n_types = 0;
  long long parameter_count = 0;
  std::vector<SeedEval> runs;
  /// Arithmetic means over the runs.
  std::vector<TypeMetrics> mean_per_type;
  /// Mean over types of mean_per_type (the headline numbers).
  TypeMetrics mean_overall;
  /// Degenerate-metric notes, e.g. precision reported as 1.0 because no
  /// positive was predicted.
  std::vector<std::string> warnings;
};

struct EvalConfig {
  NetConfig net;
  TrainConfig train;
  double test_fraction = 0.15;
  int n_seeds = 3;

  void validate() const;
};

/// Confusion metrics per type from a prediction dump. Empty-denominator
/// conventions: precision with no predicted positives and recall with no
/// true positives are reported as 1.0 (a note lands in `warnings` when
/// given); F1 is the harmonic mean of the two, 0 when both are 0.
std::vector<TypeMetrics> metrics_from_predictions(
    const std::vector<PredictionRecord>& predictions, int n_types,
    std::vector<std::string>* warnings = nullptr);

/// Full split-protocol evaluation: `n_seeds` independent runs, each with a
/// fresh seeded split, weight initialization, and batch order. Every run
/// trains per `mode`, keeps the weights of the best test epoch (mean test
/// accuracy for combined; each member's own type accuracy for separate),
/// dumps thresholded test predictions, and computes metrics from that dump.
/// Per-type metrics and the overall row are averaged across runs.
EvalReport evaluate_split(const Dataset& dataset, SplitKind split,
                          EvalMode mode, const EvalConfig& cfg, uint64_t seed);

std::string format_eval_report_json(const EvalReport& report);

// ---------------------------------------------------------------------------
// Detection
// ---------------------------------------------------------------------------

/// One ranked grasp decision: where to place the hand, which grasp type to
/// execute, and the evaluator's success probability for that pair.
struct GraspDecision {
  GraspCandidate pose;
  GraspType type = GraspType::WidePower;
  double probability = 0.0;
};

struct DetectConfig {
  int k = 400;  // candidate source points per generation round
  double frame_radius = 0.01;
  RegionBox region;
  GripperConfig gripper;
  int min_region_points = 20;
  int input_points = 512;  // encoding slots, must match the model

  void validate() const;
};

/// Proposes k candidate frames on the cloud, keeps every (candidate, type)
/// pair the hand can actually attempt — the type's open-hand standoff
/// placement is collision-free against the cloud (margin
/// gripper.collision_margin) and its closing sweep contains at least
/// min_region_points points — encodes each surviving candidate once, scores
/// it with the model, and returns all surviving pairs sorted by descending
/// probability (ties broken by generation order, then type).
///
/// The i-th generated candidate is encoded with seed stream mix64(seed, i),
/// so rankings are reproducible from (cloud, k, seed) alone. `allowed_types`
/// masks grasp types (ablations); masked types are simply absent from the
/// output. Throws InvalidArgument for an empty or duplicated type list or a
/// model with too few heads, and NoFeasibleGrasp when nothing survives.
std::vector<GraspDecision> detect(const PointCloud& cloud,
                                  const Model<float>& model, int k,
                                  const DetectConfig& cfg,
                                  const std::vector<GraspType>& allowed_types,
                                  const std::vector<Vec3>& viewpoints,
                                  uint64_t seed);

std::string format_decisions_json(const std::vector<GraspDecision>& decisions);
std::vector<GraspDecision> parse_decisions_json(const std::string& text);

// ---------------------------------------------------------------------------
// Reachability stub
// ---------------------------------------------------------------------------

/// A grasp pose counts as reachable when the palm center lies inside this
/// axis-aligned workspace box and the approach direction descends at least
/// `min_elevation_deg` below the horizontal (a level or upward approach
/// cannot be executed from above the table).
struct WorkspaceConfig {
  Vec3 min{-0.6, -0.6, 0.0};
  Vec3 max{0.6, 0.6, 0.8};
  double min_elevation_deg = 15.0;

  void validate() const;
};

bool pose_reachable(const GripperPose& pose, const WorkspaceConfig& cfg);

// ---------------------------------------------------------------------------
// Clutter scenes
// ---------------------------------------------------------------------------

/// Seeded clutter generator: `cluster_count` small/medium objects rejection-
/// sampled into a tight disc around the origin plus `ring_count` large
/// upright objects around that cluster; every object gets a random yaw and
/// a collision-free footprint (circumscribed circles separated by
/// `clearance`). Cameras sit on a ring looking at the cluster center.
struct ClutterConfig {
  int cluster_count = 10;
  int ring_count = 3;
  double cluster_radius = 0.16;
  double ring_radius = 0.32;
  double clearance = 0.01;
  /// Shape-id pools drawn with replacement; empty pools default to the
  /// catalog's small+medium ids (cluster) and large ids (ring).
  std::vector<std::string> cluster_ids;
  std::vector<std::string> ring_ids;
  int cameras = 2;
  double camera_radius = 0.65;
  double camera_elevation_deg = 45.0;

  void validate() const;
};

Scene make_clutter_scene(const ShapeSet& catalog, const ClutterConfig& cfg,
                         uint64_t seed);

// ---------------------------------------------------------------------------
// Clutter-clearing trials
// ---------------------------------------------------------------------------

struct TrialConfig {
  DetectConfig detect;
  LabelConfig label;
  WorkspaceConfig workspace;
  /// The reachability scan walks at most this many top-ranked decisions.
  int top_reachable = 25;
  /// Failed detection rounds regenerate with twice the candidates, at most
  /// this many times per attempt (k, 2k, 4k, ...).
  int regenerations = 2;
  int samples_per_view = 12288;
  double table_removal_threshold = 0.005;
  /// Stop after this many consecutive attempts failing with the same
  /// (object, grasp type, failure class).
  int repeat_failure_limit = 3;
  /// Stop after this many consecutive rounds with no reachable grasp.
  int no_reachable_limit = 3;
  /// When true, a grasp that closed on more than one object still removes
  /// its target; by default it is a failure and every object stays.
  bool multi_object_removes = false;

  void validate() const;
};

struct GraspAttempt {
  /// False for rounds that found no reachable grasp (nothing was executed).
  bool executed = false;
  GraspCandidate pose;
  GraspType type = GraspType::WidePower;
  double probability = 0.0;
  int target_object = -1;  // index into the original scene's object list
  std::string target_shape;
  FailureClass outcome = FailureClass::None;
  bool success = false;
  std::string note;
};

struct TrialReport {
  int objects_total = 0;
  int objects_removed = 0;
  int attempts = 0;   // executed grasps only
  int successes = 0;
  std::vector<GraspAttempt> log;
  /// "cleared", "repeated_failure", "no_reachable", or "attempt_budget".
  std::string termination;

  double removal_rate() const {
    return objects_total == 0
               ? 0.0
               : static_cast<double>(objects_removed) /
                     static_cast<double>(objects_total);
  }
};

/// Runs one clutter-clearing trial: capture the scene, detect with the
/// ablated type set, execute the best reachable decision against the
/// closed-loop simulation, remove the target object on success, and repeat
/// until the table is cleared, the same (object, type, failure) triple fails
/// repeat_failure_limit times in a row, no_reachable_limit consecutive
/// rounds find nothing reachable, or the attempt budget
/// (3 * objects * types + 3 rounds) runs out — so the loop always
/// terminates. Rounds whose detection finds nothing are logged but do not
/// count as attempts.
TrialReport run_trial(const Scene& scene, const ShapeSet& catalog,
                      const Model<float>& model,
                      const std::vector<GraspType>& ablation,
                      const TrialConfig& cfg, uint64_t seed);

std::string format_trial_report_json(const TrialReport& report);

// ---------------------------------------------------------------------------
// Ablation benchmark
// ---------------------------------------------------------------------------

struct AblationSpec {
  std::string name;
  std::vector<GraspType> types;
};

/// The three standard ablations: all five types, the two basic types, and
/// the pincher alone.
const std::vector<AblationSpec>& standard_ablations();

struct BenchConfig {
  ClutterConfig clutter;
  TrialConfig trial;
  int trials = 10;

  void validate() const;
};

struct AblationResult {
  std::string name;
  std::vector<TrialReport> trials;
  double mean_removal_rate = 0.0;
  int attempts = 0;
  int successes = 0;
};

struct BenchReport {
  std::vector<AblationResult> ablations;
};

/// Runs every ablation over the same `trials` seeded scenes (scene i comes
/// from mix64(seed, i), shared across ablations so the comparison is
/// paired).
BenchReport run_bench(const ShapeSet& catalog, const Model<float>& model,
                      const std::vector<AblationSpec>& ablations,
                      const BenchConfig& cfg, uint64_t seed);

std::string format_bench_report_json(const BenchReport& report);

// ---------------------------------------------------------------------------
// Visualization
// ---------------------------------------------------------------------------

/// Colored ASCII PLY of the cloud: points inside the top decision's crop
/// region bright green, points inside any other decision's region dim green,
/// the rest gray. The returned text is a self-contained PLY document.
std::string render_decisions_ply(const PointCloud& cloud,
                                 const std::vector<GraspDecision>& decisions,
                                 const RegionBox& region);

}  // namespace mg

#endif  // MULTIGRASP_PIPELINE_HPP
