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
#include "multigrasp/train.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <json.hpp>

#include "multigrasp/error.hpp"
#include "multigrasp/util.hpp"

namespace mg {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    fail(ErrorCode::InvalidArgument,
         "train config: learning_rate must be positive");
  }
  if (batch_size < 1) {
    fail(ErrorCode::InvalidArgument, "train config: batch_size must be >= 1");
  }
  if (epochs < 1) {
    fail(ErrorCode::InvalidArgument, "train config: epochs must be >= 1");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    fail(ErrorCode::InvalidArgument,
         "train config: Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) {
    fail(ErrorCode::InvalidArgument,
         "train config: Adam epsilon must be positive");
  }
}

namespace {

using json = nlohmann::ordered_json;

double number_from_json(const json& value, const std::string& key) {
  if (!value.is_number()) {
    fail(ErrorCode::SchemaViolation,
         "train config: '" + key + "' must be a number");
  }
  return value.get<double>();
}

int int_from_json(const json& value, const std::string& key) {
  if (!value.is_number_integer()) {
    fail(ErrorCode::SchemaViolation,
         "train config: '" + key + "' must be an integer");
  }
  return value.get<int>();
}

}  // namespace

TrainConfig parse_train_config_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaViolation, std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    fail(ErrorCode::SchemaViolation, "train config must be a JSON object");
  }
  TrainConfig cfg;
  for (const auto& [key, value] : root.items()) {
    if (key == "learning_rate") {
      cfg.learning_rate = number_from_json(value, key);
    } else if (key == "batch_size") {
      cfg.batch_size = int_from_json(value, key);
    } else if (key == "epochs") {
      cfg.epochs = int_from_json(value, key);
    } else if (key == "seed") {
      if (!value.is_number_unsigned() && !value.is_number_integer()) {
        fail(ErrorCode::SchemaViolation,
             "train config: 'seed' must be an integer");
      }
      cfg.seed = value.get<uint64_t>();
    } else if (key == "adam") {
      if (!value.is_object()) {
        fail(ErrorCode::SchemaViolation,
             "train config: 'adam' must be an object");
      }
      for (const auto& [akey, avalue] : value.items()) {
        if (akey == "beta1") {
          cfg.adam_beta1 = number_from_json(avalue, akey);
        } else if (akey == "beta2") {
          cfg.adam_beta2 = number_from_json(avalue, akey);
        } else if (akey == "epsilon") {
          cfg.adam_eps = number_from_json(avalue, akey);
        } else {
          fail(ErrorCode::SchemaViolation,
               "train config: unknown adam key '" + akey + "'");
        }
      }
    } else {
      fail(ErrorCode::SchemaViolation,
           "train config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

std::string format_train_config_json(const TrainConfig& cfg) {
  cfg.validate();
  json root;
  root["learning_rate"] = cfg.learning_rate;
  root["batch_size"] = cfg.batch_size;
  root["epochs"] = cfg.epochs;
  root["seed"] = cfg.seed;
  root["adam"] = {{"beta1", cfg.adam_beta1},
                  {"beta2", cfg.adam_beta2},
                  {"epsilon", cfg.adam_eps}};
  return root.dump(2) + "\n";
}

Split split_from_tags(const Dataset& dataset) {
  Split split;
  for (size_t i = 0; i < dataset.exemplars.size(); ++i) {
    const std::string& tag = dataset.exemplars[i].split_tag;
    if (tag == "train") {
      split.train.push_back(static_cast<int>(i));
    } else if (tag == "test") {
      split.test.push_back(static_cast<int>(i));
    } else {
      fail(ErrorCode::SchemaViolation,
           "exemplar " + std::to_string(i) + " has split tag '" + tag +
               "', expected 'train' or 'test'");
    }
  }
  return split;
}

PreparedDataset prepare_dataset(const NetConfig& cfg, const Dataset& dataset) {
  PreparedDataset prepared;
  prepared.groupings.reserve(dataset.exemplars.size());
  for (const LabeledExemplar& ex : dataset.exemplars) {
    prepared.groupings.push_back(compute_grouping(cfg, ex.encoding));
  }
  return prepared;
}

std::string format_train_log_csv(const TrainLog& log) {
  std::string out = "epoch,loss";
  const size_t n_types =
      log.epochs.empty() ? 0 : log.epochs.front().train_accuracy.size();
  for (size_t t = 0; t < n_types; ++t) {
    out += ",train_acc_t" + std::to_string(t);
  }
  for (size_t t = 0; t < n_types; ++t) {
    out += ",test_acc_t" + std::to_string(t);
  }
  out += "\n";
  for (const EpochRow& row : log.epochs) {
    out += std::to_string(row.epoch) + "," + format_double(row.loss);
    for (double v : row.train_accuracy) out += "," + format_double(v);
    for (double v : row.test_accuracy) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

namespace {

/// Flat views over every weight and bias, in the fixed traversal order.
std::vector<std::pair<float*, size_t>> tensor_views(Model<float>& model) {
  std::vector<std::pair<float*, size_t>> views;
  for_each_linear(model, [&](const std::string&, Linear<float>& layer) {
    views.emplace_back(layer.w.data(), layer.w.size());
    views.emplace_back(layer.b.data(), layer.b.size());
  });
  return views;
}

std::vector<std::pair<const float*, size_t>> tensor_views(
    const Gradients<float>& grads) {
  std::vector<std::pair<const float*, size_t>> views;
  for (const auto& stage : grads.sa) {
    for (const Linear<float>& layer : stage) {
      views.emplace_back(layer.w.data(), layer.w.size());
      views.emplace_back(layer.b.data(), layer.b.size());
    }
  }
  for (const Linear<float>& layer : grads.fc) {
    views.emplace_back(layer.w.data(), layer.w.size());
    views.emplace_back(layer.b.data(), layer.b.size());
  }
  return views;
}

void zero_gradients(Gradients<float>& grads) {
  for (auto& stage : grads.sa) {
    for (Linear<float>& layer : stage) {
      std::fill(layer.w.begin(), layer.w.end(), 0.0f);
      std::fill(layer.b.begin(), layer.b.end(), 0.0f);
    }
  }
  for (Linear<float>& layer : grads.fc) {
    std::fill(layer.w.begin(), layer.w.end(), 0.0f);
    std::fill(layer.b.begin(), layer.b.end(), 0.0f);
  }
}

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long long step = 0;
};

std::vector<float> snapshot_weights(const Model<float>& model) {
  std::vector<float> flat;
  for_each_linear(model, [&](const std::string&, const Linear<float>& layer) {
    flat.insert(flat.end(), layer.w.begin(), layer.w.end());
    flat.insert(flat.end(), layer.b.begin(), layer.b.end());
  });
  return flat;
}

void restore_weights(Model<float>& model, const std::vector<float>& flat) {
  size_t cursor = 0;
  for_each_linear(model, [&](const std::string&, Linear<float>& layer) {
    std::copy(flat.begin() + static_cast<long>(cursor),
              flat.begin() + static_cast<long>(cursor + layer.w.size()),
              layer.w.begin());
    cursor += layer.w.size();
    std::copy(flat.begin() + static_cast<long>(cursor),
              flat.begin() + static_cast<long>(cursor + layer.b.size()),
              layer.b.begin());
    cursor += layer.b.size();
  });
}

double mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

/// One full training run over `model`. `mask` (optional) restricts the loss
/// to selected type rows, and `best_metric` reduces a test-accuracy vector
/// to the scalar used for best-epoch selection.
template <typename Metric>
TrainLog train_model(Model<float>& model, const Dataset& dataset,
                     const PreparedDataset& prepared, const Split& split,
                     const TrainConfig& cfg, const std::vector<int>* mask,
                     Metric&& best_metric) {
  cfg.validate();
  if (prepared.groupings.size() != dataset.exemplars.size()) {
    fail(ErrorCode::ShapeMismatch,
         "prepared dataset is not aligned with the dataset");
  }
  if (split.train.empty()) {
    fail(ErrorCode::EmptySplit, "training split has no exemplars");
  }
  if (split.test.empty()) {
    fail(ErrorCode::EmptySplit, "test split has no exemplars");
  }

  const size_t n_params = snapshot_weights(model).size();
  AdamState adam;
  adam.m.assign(n_params, 0.0);
  adam.v.assign(n_params, 0.0);

  Gradients<float> grads = Gradients<float>::zeros_like(model);
  std::vector<int> order = split.train;
  const Rng shuffle_root(cfg.seed, 0x747261696e696e67ULL);

  TrainLog log;
  double best_score = -1.0;
  std::vector<float> best_weights = snapshot_weights(model);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng = shuffle_root.fork(static_cast<uint64_t>(epoch));
    for (size_t i = order.size(); i > 1; --i) {
      const size_t j = rng.below(static_cast<uint32_t>(i));
      std::swap(order[i - 1], order[j]);
    }

    double epoch_loss = 0.0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(cfg.batch_size)) {
      const size_t stop =
          std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      const double batch_n = static_cast<double>(stop - start);
      zero_gradients(grads);
      for (size_t i = start; i < stop; ++i) {
        const int idx = order[i];
        const LabeledExemplar& ex =
            dataset.exemplars[static_cast<size_t>(idx)];
        epoch_loss += static_cast<double>(
            backward(model, prepared.groupings[static_cast<size_t>(idx)],
                     ex.encoding, ex.labels, grads, mask));
      }

      // Adam step over the mean batch gradient, accumulated and applied in
      // a fixed order so training is bit-reproducible.
      ++adam.step;
      const double bc1 =
          1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam.step));
      const double bc2 =
          1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam.step));
      const auto grad_views = tensor_views(grads);
      const auto weight_views = tensor_views(model);
      size_t cursor = 0;
      for (size_t t = 0; t < weight_views.size(); ++t) {
        float* w = weight_views[t].first;
        const float* g = grad_views[t].first;
        for (size_t i = 0; i < weight_views[t].second; ++i, ++cursor) {
          const double gi = static_cast<double>(g[i]) / batch_n;
          adam.m[cursor] =
              cfg.adam_beta1 * adam.m[cursor] + (1.0 - cfg.adam_beta1) * gi;
          adam.v[cursor] = cfg.adam_beta2 * adam.v[cursor] +
                           (1.0 - cfg.adam_beta2) * gi * gi;
          const double mhat = adam.m[cursor] / bc1;
          const double vhat = adam.v[cursor] / bc2;
          w[i] = static_cast<float>(
              static_cast<double>(w[i]) -
              cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps));
        }
      }
    }

    EpochRow row;
    row.epoch = epoch;
    row.loss = epoch_loss / static_cast<double>(order.size());
    row.train_accuracy = evaluate_accuracy(model, dataset, prepared, split.train);
    row.test_accuracy = evaluate_accuracy(model, dataset, prepared, split.test);
    const double score = best_metric(row.test_accuracy);
    if (score > best_score) {
      best_score = score;
      best_weights = snapshot_weights(model);
      log.best_epoch = epoch;
    }
    log.epochs.push_back(std::move(row));
  }

  restore_weights(model, best_weights);
  return log;
}

}  // namespace

TrainLog train_combined(Model<float>& model, const Dataset& dataset,
                        const PreparedDataset& prepared, const Split& split,
                        const TrainConfig& cfg) {
  return train_model(model, dataset, prepared, split, cfg, nullptr,
                     [](const std::vector<double>& acc) { return mean(acc); });
}

SeparateEnsemble make_separate_ensemble(const NetConfig& cfg) {
  SeparateEnsemble ensemble;
  for (int t = 0; t < cfg.n_types; ++t) {
    ensemble.members.push_back(make_model<float>(cfg));
  }
  return ensemble;
}

long long param_count(const SeparateEnsemble& ensemble) {
  long long total = 0;
  for (const Model<float>& member : ensemble.members) {
    total += param_count(member);
  }
  return total;
}

std::vector<TrainLog> train_separate(SeparateEnsemble& ensemble,
                                     const Dataset& dataset,
                                     const PreparedDataset& prepared,
                                     const Split& split,
                                     const TrainConfig& cfg) {
  std::vector<TrainLog> logs;
  for (size_t t = 0; t < ensemble.members.size(); ++t) {
    const int n_types = ensemble.members[t].cfg.n_types;
    std::vector<int> mask(static_cast<size_t>(n_types), 0);
    mask[t] = 1;
    logs.push_back(train_model(
        ensemble.members[t], dataset, prepared, split, cfg, &mask,
        [t](const std::vector<double>& acc) { return acc[t]; }));
  }
  return logs;
}

std::vector<double> evaluate_accuracy(const Model<float>& model,
                                      const Dataset& dataset,
                                      const PreparedDataset& prepared,
                                      const std::vector<int>& indices) {
  const int n = model.cfg.n_types;
  std::vector<double> correct(static_cast<size_t>(n), 0.0);
  for (int idx : indices) {
    const LabeledExemplar& ex = dataset.exemplars[static_cast<size_t>(idx)];
    const std::vector<float> probs = predict_probs(
        model, prepared.groupings[static_cast<size_t>(idx)], ex.encoding);
    for (int t = 0; t < n; ++t) {
      const int predicted = probs[static_cast<size_t>(t)] > 0.5f ? 1 : 0;
      if (predicted == ex.labels[static_cast<size_t>(t)]) {
        correct[static_cast<size_t>(t)] += 1.0;
      }
    }
  }
  if (!indices.empty()) {
    for (double& c : correct) c /= static_cast<double>(indices.size());
  }
  return correct;
}

std::vector<double> evaluate_accuracy(const SeparateEnsemble& ensemble,
                                      const Dataset& dataset,
                                      const PreparedDataset& prepared,
                                      const std::vector<int>& indices) {
  std::vector<double> out;
  for (size_t t = 0; t < ensemble.members.size(); ++t) {
    out.push_back(evaluate_accuracy(ensemble.members[t], dataset, prepared,
                                    indices)[t]);
  }
  return out;
}

}  // namespace mg
