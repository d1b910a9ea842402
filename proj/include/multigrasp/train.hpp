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
#ifndef MULTIGRASP_TRAIN_HPP
#define MULTIGRASP_TRAIN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "multigrasp/dataset.hpp"
#include "multigrasp/net.hpp"

namespace mg {

struct TrainConfig {
  double learning_rate = 1e-5;
  int batch_size = 16;
  int epochs = 1;
  uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

TrainConfig parse_train_config_json(const std::string& text);
std::string format_train_config_json(const TrainConfig& cfg);

/// Exemplar indices for the two sides of a split.
struct Split {
  std::vector<int> train;
  std::vector<int> test;
};

/// Collects indices by the exemplars' "train"/"test" split tags.
Split split_from_tags(const Dataset& dataset);

/// Groupings precomputed once per (config, dataset) pair; index-aligned with
/// the dataset's exemplars. Grouping is weight-independent, so one prepared
/// dataset serves every model and epoch.
struct PreparedDataset {
  std::vector<Grouping> groupings;
};

PreparedDataset prepare_dataset(const NetConfig& cfg, const Dataset& dataset);

struct EpochRow {
  int epoch = 0;
  double loss = 0.0;
  std::vector<double> train_accuracy;  // per grasp type
  std::vector<double> test_accuracy;   // per grasp type
};

struct TrainLog {
  std::vector<EpochRow> epochs;
  int best_epoch = -1;
};

/// CSV rendering of a training log: epoch, loss, then per-type train and
/// test accuracies.
std::string format_train_log_csv(const TrainLog& log);

/// Trains one model on all grasp types jointly. Runs every epoch, then
/// restores the weights from the epoch whose mean test accuracy across
/// types was highest (earliest epoch wins ties). Deterministic for a fixed
/// seed. Throws EmptySplit if either side of the split is empty.
TrainLog train_combined(Model<float>& model, const Dataset& dataset,
                        const PreparedDataset& prepared, const Split& split,
                        const TrainConfig& cfg);

/// One independently trained model per grasp type; member k is read only
/// for type k. Every member carries the full architecture, so the ensemble
/// holds exactly n_types times the combined model's parameters.
struct SeparateEnsemble {
  std::vector<Model<float>> members;
};

SeparateEnsemble make_separate_ensemble(const NetConfig& cfg);
long long param_count(const SeparateEnsemble& ensemble);

/// Trains each member on its own type (the loss masks out all other rows)
/// and snapshots each member at its own best test-accuracy epoch.
std::vector<TrainLog> train_separate(SeparateEnsemble& ensemble,
                                     const Dataset& dataset,
                                     const PreparedDataset& prepared,
                                     const Split& split,
                                     const TrainConfig& cfg);

/// Fraction of exemplars (among `indices`) whose thresholded success
/// probability matches the label, per grasp type.
std::vector<double> evaluate_accuracy(const Model<float>& model,
                                      const Dataset& dataset,
                                      const PreparedDataset& prepared,
                                      const std::vector<int>& indices);
std::vector<double> evaluate_accuracy(const SeparateEnsemble& ensemble,
                                      const Dataset& dataset,
                                      const PreparedDataset& prepared,
                                      const std::vector<int>& indices);

}  // namespace mg

#endif  // MULTIGRASP_TRAIN_HPP
