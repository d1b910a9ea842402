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
#ifndef MULTIGRASP_NET_HPP
#define MULTIGRASP_NET_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "multigrasp/encoding.hpp"
#include "multigrasp/error.hpp"
#include "multigrasp/geom.hpp"
#include "multigrasp/rng.hpp"

namespace mg {

/// One point-set abstraction stage: farthest-point sampling down to
/// `sample_count` centers, grouping of every input point within `radius` of
/// each center, a small MLP applied to [relative coordinates; features] of
/// each group member, and mean pooling over the group.
struct SaSpec {
  int sample_count = 0;
  double radius = 0.0;
  std::vector<int> mlp;
};

struct NetConfig {
  /// Padded encoding size the model accepts.
  int input_points = 512;
  int n_types = 5;
  std::vector<SaSpec> sa = {{512, 0.015, {32, 32}}, {128, 0.03, {64, 64}}};
  /// Widths of the four hidden fully-connected layers; a fifth linear layer
  /// of width 2*n_types is always appended.
  std::vector<int> fc_hidden = {256, 128, 64, 32};

  void validate() const;
  /// Feature width entering stage `layer` (0 for raw points).
  int feature_width_into(int layer) const;
  /// Width of the pooled global feature (output of the last stage).
  int global_width() const;
};

NetConfig parse_net_config_json(const std::string& text);
std::string format_net_config_json(const NetConfig& cfg);

/// Exact parameter count implied by a config.
long long param_count(const NetConfig& cfg);

/// Geometry-only precomputation for one encoding: per stage, the input
/// positions, chosen centers, and the members of each center's radius
/// group (center included). Padding slots never participate. The grouping
/// depends only on the config's sampling geometry, never on weights, so it
/// is shared across models and training epochs.
struct GroupingLayer {
  std::vector<Vec3> points;
  std::vector<int> centers;
  std::vector<std::vector<int>> groups;
};

struct Grouping {
  std::vector<GroupingLayer> layers;
  int valid_count = 0;
};

Grouping compute_grouping(const NetConfig& cfg, const GraspEncoding& encoding);

template <typename T>
struct Linear {
  std::vector<T> w;  // row-major, out x in
  std::vector<T> b;  // out
  int in = 0;
  int out = 0;

  void resize(int in_width, int out_width) {
    in = in_width;
    out = out_width;
    w.assign(static_cast<size_t>(in) * static_cast<size_t>(out), T(0));
    b.assign(static_cast<size_t>(out), T(0));
  }
};

/// The evaluator network. All tensors live in `sa` (per stage, per MLP
/// sub-layer) and `fc` (five layers; ReLU on the first four).
template <typename T>
struct Model {
  NetConfig cfg;
  std::vector<std::vector<Linear<T>>> sa;
  std::vector<Linear<T>> fc;
};

/// Builds a zero-initialized model for the config.
template <typename T>
Model<T> make_model(const NetConfig& cfg) {
  cfg.validate();
  Model<T> model;
  model.cfg = cfg;
  model.sa.resize(cfg.sa.size());
  for (size_t l = 0; l < cfg.sa.size(); ++l) {
    int in = 3 + cfg.feature_width_into(static_cast<int>(l));
    for (int width : cfg.sa[l].mlp) {
      Linear<T> layer;
      layer.resize(in, width);
      model.sa[l].push_back(std::move(layer));
      in = width;
    }
  }
  int in = cfg.global_width();
  for (int width : cfg.fc_hidden) {
    Linear<T> layer;
    layer.resize(in, width);
    model.fc.push_back(std::move(layer));
    in = width;
  }
  Linear<T> head;
  head.resize(in, 2 * cfg.n_types);
  model.fc.push_back(std::move(head));
  return model;
}

/// Visits every linear layer in a fixed order with a stable name.
template <typename T, typename Fn>
void for_each_linear(Model<T>& model, Fn&& fn) {
  for (size_t l = 0; l < model.sa.size(); ++l) {
    for (size_t k = 0; k < model.sa[l].size(); ++k) {
      fn("sa" + std::to_string(l) + ".mlp" + std::to_string(k),
         model.sa[l][k]);
    }
  }
  for (size_t k = 0; k < model.fc.size(); ++k) {
    fn("fc" + std::to_string(k), model.fc[k]);
  }
}

template <typename T, typename Fn>
void for_each_linear(const Model<T>& model, Fn&& fn) {
  for_each_linear(const_cast<Model<T>&>(model),
                  [&](const std::string& name, Linear<T>& layer) {
                    fn(name, static_cast<const Linear<T>&>(layer));
                  });
}

template <typename T>
long long param_count(const Model<T>& model) {
  long long total = 0;
  for_each_linear(model, [&](const std::string&, const Linear<T>& layer) {
    total += static_cast<long long>(layer.w.size() + layer.b.size());
  });
  return total;
}

/// Seeded He-normal weight initialization; biases stay zero.
template <typename T>
void init_weights(Model<T>& model, uint64_t seed) {
  Rng rng(seed, 0x6e65742d696e6974ULL);
  for_each_linear(model, [&](const std::string&, Linear<T>& layer) {
    const double stddev = std::sqrt(2.0 / static_cast<double>(layer.in));
    for (T& v : layer.w) v = static_cast<T>(rng.normal() * stddev);
    for (T& v : layer.b) v = T(0);
  });
}

/// Copies a model across scalar types (used to run the float production
/// weights through the double-precision path and vice versa).
template <typename To, typename From>
Model<To> cast_model(const Model<From>& src) {
  Model<To> dst = make_model<To>(src.cfg);
  for (size_t l = 0; l < src.sa.size(); ++l) {
    for (size_t k = 0; k < src.sa[l].size(); ++k) {
      for (size_t i = 0; i < src.sa[l][k].w.size(); ++i) {
        dst.sa[l][k].w[i] = static_cast<To>(src.sa[l][k].w[i]);
      }
      for (size_t i = 0; i < src.sa[l][k].b.size(); ++i) {
        dst.sa[l][k].b[i] = static_cast<To>(src.sa[l][k].b[i]);
      }
    }
  }
  for (size_t k = 0; k < src.fc.size(); ++k) {
    for (size_t i = 0; i < src.fc[k].w.size(); ++i) {
      dst.fc[k].w[i] = static_cast<To>(src.fc[k].w[i]);
    }
    for (size_t i = 0; i < src.fc[k].b.size(); ++i) {
      dst.fc[k].b[i] = static_cast<To>(src.fc[k].b[i]);
    }
  }
  return dst;
}

namespace detail {

template <typename T>
void affine(const Linear<T>& layer, const T* x, T* y) {
  for (int o = 0; o < layer.out; ++o) {
    T acc = layer.b[static_cast<size_t>(o)];
    const T* row = layer.w.data() + static_cast<size_t>(o) * layer.in;
    for (int i = 0; i < layer.in; ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
}

template <typename T>
void relu_inplace(T* x, int n) {
  for (int i = 0; i < n; ++i) x[i] = x[i] > T(0) ? x[i] : T(0);
}

/// Full forward activations kept for the backward pass.
template <typename T>
struct Trace {
  // Features entering each stage: [stage][point * C_in] (C_in = 0 at the
  // first stage), plus the pooled outputs per stage.
  std::vector<std::vector<T>> stage_inputs;
  // Per stage, per center: the stacked member MLP inputs and the
  // post-activation of every MLP sub-layer.
  std::vector<std::vector<std::vector<T>>> member_inputs;   // [stage][center]
  std::vector<std::vector<std::vector<std::vector<T>>>> member_acts;
  // [stage][center][sublayer][member*width]
  std::vector<std::vector<T>> pooled;  // [stage][center * C_out]
  std::vector<T> global_feature;
  std::vector<std::vector<T>> fc_acts;  // post-ReLU (except the last, raw)
};

template <typename T>
Trace<T> forward_trace(const Model<T>& model, const Grouping& grouping) {
  const NetConfig& cfg = model.cfg;
  if (grouping.layers.size() != cfg.sa.size()) {
    fail(ErrorCode::ShapeMismatch,
         "grouping has " + std::to_string(grouping.layers.size()) +
             " stages, model expects " + std::to_string(cfg.sa.size()));
  }
  Trace<T> trace;
  const size_t n_stages = cfg.sa.size();
  trace.stage_inputs.resize(n_stages);
  trace.member_inputs.resize(n_stages);
  trace.member_acts.resize(n_stages);
  trace.pooled.resize(n_stages);

  std::vector<T> features;  // per current stage input point, width C_in
  int c_in = 0;
  for (size_t l = 0; l < n_stages; ++l) {
    const GroupingLayer& layer = grouping.layers[l];
    const auto& mlp = model.sa[l];
    const int mlp_in = 3 + c_in;
    const int c_out = mlp.back().out;
    trace.stage_inputs[l] = features;
    trace.member_inputs[l].resize(layer.centers.size());
    trace.member_acts[l].resize(layer.centers.size());
    trace.pooled[l].assign(layer.centers.size() * static_cast<size_t>(c_out),
                           T(0));

    for (size_t c = 0; c < layer.centers.size(); ++c) {
      const std::vector<int>& group = layer.groups[c];
      const Vec3 center = layer.points[static_cast<size_t>(layer.centers[c])];
      const int m = static_cast<int>(group.size());

      std::vector<T>& inputs = trace.member_inputs[l][c];
      inputs.resize(static_cast<size_t>(m) * mlp_in);
      for (int j = 0; j < m; ++j) {
        const Vec3& p = layer.points[static_cast<size_t>(group[j])];
        T* row = inputs.data() + static_cast<size_t>(j) * mlp_in;
        row[0] = static_cast<T>(p.x) - static_cast<T>(center.x);
        row[1] = static_cast<T>(p.y) - static_cast<T>(center.y);
        row[2] = static_cast<T>(p.z) - static_cast<T>(center.z);
        const T* feat =
            features.data() + static_cast<size_t>(group[j]) * c_in;
        for (int i = 0; i < c_in; ++i) row[3 + i] = feat[i];
      }

      auto& acts = trace.member_acts[l][c];
      acts.resize(mlp.size());
      const T* prev = inputs.data();
      int prev_width = mlp_in;
      for (size_t k = 0; k < mlp.size(); ++k) {
        acts[k].resize(static_cast<size_t>(m) * mlp[k].out);
        for (int j = 0; j < m; ++j) {
          affine(mlp[k], prev + static_cast<size_t>(j) * prev_width,
                 acts[k].data() + static_cast<size_t>(j) * mlp[k].out);
        }
        relu_inplace(acts[k].data(), m * mlp[k].out);
        prev = acts[k].data();
        prev_width = mlp[k].out;
      }

      T* pooled = trace.pooled[l].data() + c * static_cast<size_t>(c_out);
      const T inv_m = T(1) / static_cast<T>(m);
      for (int j = 0; j < m; ++j) {
        const T* h = acts.back().data() + static_cast<size_t>(j) * c_out;
        for (int i = 0; i < c_out; ++i) pooled[i] += h[i];
      }
      for (int i = 0; i < c_out; ++i) pooled[i] *= inv_m;
    }
    features = trace.pooled[l];
    c_in = c_out;
  }

  // Global mean pool over the final stage's centers.
  const int gw = cfg.global_width();
  const size_t n_centers = grouping.layers.back().centers.size();
  trace.global_feature.assign(static_cast<size_t>(gw), T(0));
  for (size_t c = 0; c < n_centers; ++c) {
    const T* row = features.data() + c * static_cast<size_t>(gw);
    for (int i = 0; i < gw; ++i) trace.global_feature[static_cast<size_t>(i)] += row[i];
  }
  const T inv_c = T(1) / static_cast<T>(n_centers);
  for (T& v : trace.global_feature) v *= inv_c;

  // Fully-connected head: ReLU on all but the last layer.
  trace.fc_acts.resize(model.fc.size());
  const std::vector<T>* x = &trace.global_feature;
  for (size_t k = 0; k < model.fc.size(); ++k) {
    trace.fc_acts[k].resize(static_cast<size_t>(model.fc[k].out));
    affine(model.fc[k], x->data(), trace.fc_acts[k].data());
    if (k + 1 < model.fc.size()) {
      relu_inplace(trace.fc_acts[k].data(), model.fc[k].out);
    }
    x = &trace.fc_acts[k];
  }
  return trace;
}

}  // namespace detail

/// Validates that an encoding matches the model's expected padded size.
template <typename T>
void check_encoding_shape(const Model<T>& model,
                          const GraspEncoding& encoding) {
  if (static_cast<int>(encoding.points.size()) != model.cfg.input_points) {
    fail(ErrorCode::ShapeMismatch,
         "encoding holds " + std::to_string(encoding.points.size()) +
             " slots, model expects " +
             std::to_string(model.cfg.input_points));
  }
}

/// Runs the network; returns row-major logits, one (failure, success) pair
/// per grasp type.
template <typename T>
std::vector<T> forward_logits(const Model<T>& model, const Grouping& grouping,
                              const GraspEncoding& encoding) {
  check_encoding_shape(model, encoding);
  return detail::forward_trace(model, grouping).fc_acts.back();
}

/// Softmax success probabilities (column 1 of each row's softmax).
template <typename T>
std::vector<T> predict_probs(const Model<T>& model, const Grouping& grouping,
                             const GraspEncoding& encoding) {
  const std::vector<T> logits = forward_logits(model, grouping, encoding);
  std::vector<T> probs(static_cast<size_t>(model.cfg.n_types));
  for (int i = 0; i < model.cfg.n_types; ++i) {
    const T a = logits[static_cast<size_t>(2 * i)];
    const T b = logits[static_cast<size_t>(2 * i + 1)];
    const T m = std::max(a, b);
    const T ea = std::exp(a - m);
    const T eb = std::exp(b - m);
    probs[static_cast<size_t>(i)] = eb / (ea + eb);
  }
  return probs;
}

/// Summed per-type cross entropy with its gradient w.r.t. the logits.
/// `mask` (optional) selects which type rows contribute; masked-out rows get
/// zero gradient. Log-sum-exp keeps saturated rows finite.
template <typename T>
T loss_summed_ce(const std::vector<T>& logits, const std::vector<int>& labels,
                 std::vector<T>* grad_logits = nullptr,
                 const std::vector<int>* mask = nullptr) {
  const int n = static_cast<int>(labels.size());
  if (static_cast<int>(logits.size()) != 2 * n) {
    fail(ErrorCode::ShapeMismatch, "logit/label count mismatch");
  }
  if (grad_logits != nullptr) grad_logits->assign(logits.size(), T(0));
  T loss = T(0);
  for (int i = 0; i < n; ++i) {
    if (mask != nullptr && (*mask)[static_cast<size_t>(i)] == 0) continue;
    const T a = logits[static_cast<size_t>(2 * i)];
    const T b = logits[static_cast<size_t>(2 * i + 1)];
    const T m = std::max(a, b);
    const T ea = std::exp(a - m);
    const T eb = std::exp(b - m);
    const T lse = m + std::log(ea + eb);
    const int label = labels[static_cast<size_t>(i)] != 0 ? 1 : 0;
    loss += lse - (label == 1 ? b : a);
    if (grad_logits != nullptr) {
      const T pa = ea / (ea + eb);
      const T pb = eb / (ea + eb);
      (*grad_logits)[static_cast<size_t>(2 * i)] = pa - (label == 0 ? T(1) : T(0));
      (*grad_logits)[static_cast<size_t>(2 * i + 1)] =
          pb - (label == 1 ? T(1) : T(0));
    }
  }
  return loss;
}

/// Gradient holder shaped exactly like the model's tensors.
template <typename T>
struct Gradients {
  std::vector<std::vector<Linear<T>>> sa;
  std::vector<Linear<T>> fc;

  static Gradients<T> zeros_like(const Model<T>& model) {
    Gradients<T> g;
    g.sa.resize(model.sa.size());
    for (size_t l = 0; l < model.sa.size(); ++l) {
      for (const Linear<T>& layer : model.sa[l]) {
        Linear<T> z;
        z.resize(layer.in, layer.out);
        g.sa[l].push_back(std::move(z));
      }
    }
    for (const Linear<T>& layer : model.fc) {
      Linear<T> z;
      z.resize(layer.in, layer.out);
      g.fc.push_back(std::move(z));
    }
    return g;
  }
};

/// Loss plus exact analytic gradients for one exemplar. Accumulates into
/// `grads` (callers zero it or reuse it across a batch).
template <typename T>
T backward(const Model<T>& model, const Grouping& grouping,
           const GraspEncoding& encoding, const std::vector<int>& labels,
           Gradients<T>& grads, const std::vector<int>* mask = nullptr) {
  check_encoding_shape(model, encoding);
  if (static_cast<int>(labels.size()) != model.cfg.n_types) {
    fail(ErrorCode::ShapeMismatch, "label count mismatch");
  }
  const detail::Trace<T> trace = detail::forward_trace(model, grouping);

  std::vector<T> grad;
  const T loss =
      loss_summed_ce(trace.fc_acts.back(), labels, &grad, mask);

  // Fully-connected backward.
  for (size_t k = model.fc.size(); k-- > 0;) {
    const Linear<T>& layer = model.fc[k];
    const std::vector<T>& x =
        k == 0 ? trace.global_feature : trace.fc_acts[k - 1];
    Linear<T>& g = grads.fc[k];
    std::vector<T> grad_x(static_cast<size_t>(layer.in), T(0));
    for (int o = 0; o < layer.out; ++o) {
      const T go = grad[static_cast<size_t>(o)];
      if (go != T(0)) {
        T* wrow = g.w.data() + static_cast<size_t>(o) * layer.in;
        const T* wsrc = layer.w.data() + static_cast<size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i) {
          wrow[i] += go * x[static_cast<size_t>(i)];
          grad_x[static_cast<size_t>(i)] += go * wsrc[i];
        }
        g.b[static_cast<size_t>(o)] += go;
      }
    }
    if (k > 0) {
      // ReLU mask from the stored post-activation.
      for (int i = 0; i < layer.in; ++i) {
        if (trace.fc_acts[k - 1][static_cast<size_t>(i)] <= T(0)) {
          grad_x[static_cast<size_t>(i)] = T(0);
        }
      }
    }
    grad = std::move(grad_x);
  }

  // Spread the global-pool gradient across the last stage's centers.
  const int gw = model.cfg.global_width();
  const size_t last = model.cfg.sa.size() - 1;
  const size_t n_centers = grouping.layers[last].centers.size();
  const T inv_c = T(1) / static_cast<T>(n_centers);
  std::vector<T> grad_features(n_centers * static_cast<size_t>(gw));
  for (size_t c = 0; c < n_centers; ++c) {
    for (int i = 0; i < gw; ++i) {
      grad_features[c * gw + static_cast<size_t>(i)] =
          grad[static_cast<size_t>(i)] * inv_c;
    }
  }

  // Stage-by-stage backward through grouping, MLPs, and mean pools.
  for (size_t l = model.cfg.sa.size(); l-- > 0;) {
    const GroupingLayer& layer = grouping.layers[l];
    const auto& mlp = model.sa[l];
    const int c_in = model.cfg.feature_width_into(static_cast<int>(l));
    const int mlp_in = 3 + c_in;
    const int c_out = mlp.back().out;
    std::vector<T> grad_prev;
    if (l > 0) {
      grad_prev.assign(layer.points.size() * static_cast<size_t>(c_in), T(0));
    }

    for (size_t c = 0; c < layer.centers.size(); ++c) {
      const std::vector<int>& group = layer.groups[c];
      const int m = static_cast<int>(group.size());
      const T inv_m = T(1) / static_cast<T>(m);
      const auto& acts = trace.member_acts[l][c];
      const std::vector<T>& inputs = trace.member_inputs[l][c];
      const T* grad_pool = grad_features.data() + c * static_cast<size_t>(c_out);

      // Mean pool: every member's final activation shares the gradient.
      std::vector<T> g(static_cast<size_t>(m) * c_out);
      for (int j = 0; j < m; ++j) {
        for (int i = 0; i < c_out; ++i) {
          g[static_cast<size_t>(j) * c_out + i] = grad_pool[i] * inv_m;
        }
      }

      for (size_t k = mlp.size(); k-- > 0;) {
        const Linear<T>& lay = mlp[k];
        Linear<T>& gl = grads.sa[l][k];
        // ReLU mask of this sub-layer's own output.
        for (size_t idx = 0; idx < g.size(); ++idx) {
          if (acts[k][idx] <= T(0)) g[idx] = T(0);
        }
        const T* x = k == 0 ? inputs.data() : acts[k - 1].data();
        const int in_w = k == 0 ? mlp_in : mlp[k - 1].out;
        std::vector<T> gx(static_cast<size_t>(m) * in_w, T(0));
        for (int j = 0; j < m; ++j) {
          const T* gj = g.data() + static_cast<size_t>(j) * lay.out;
          const T* xj = x + static_cast<size_t>(j) * in_w;
          T* gxj = gx.data() + static_cast<size_t>(j) * in_w;
          for (int o = 0; o < lay.out; ++o) {
            const T go = gj[o];
            if (go == T(0)) continue;
            T* wrow = gl.w.data() + static_cast<size_t>(o) * in_w;
            const T* wsrc = lay.w.data() + static_cast<size_t>(o) * in_w;
            for (int i = 0; i < in_w; ++i) {
              wrow[i] += go * xj[i];
              gxj[i] += go * wsrc[i];
            }
            gl.b[static_cast<size_t>(o)] += go;
          }
        }
        g = std::move(gx);
      }

      // Member-input gradient: positions carry no parameters; the feature
      // slice flows to the previous stage's outputs.
      if (l > 0) {
        for (int j = 0; j < m; ++j) {
          const T* gj = g.data() + static_cast<size_t>(j) * mlp_in;
          T* dst = grad_prev.data() +
                   static_cast<size_t>(group[static_cast<size_t>(j)]) * c_in;
          for (int i = 0; i < c_in; ++i) dst[i] += gj[3 + i];
        }
      }
    }
    grad_features = std::move(grad_prev);
  }
  return loss;
}

/// Convenience wrapper for tests: zeroed gradients plus loss.
template <typename T>
std::pair<T, Gradients<T>> loss_and_gradients(
    const Model<T>& model, const Grouping& grouping,
    const GraspEncoding& encoding, const std::vector<int>& labels,
    const std::vector<int>* mask = nullptr) {
  Gradients<T> grads = Gradients<T>::zeros_like(model);
  const T loss = backward(model, grouping, encoding, labels, grads, mask);
  return {loss, std::move(grads)};
}

/// Smallest |pre-activation| across every ReLU in one forward pass. Used to
/// confirm a finite-difference probe cannot cross an activation kink.
template <typename T>
T smallest_preactivation_magnitude(const Model<T>& model,
                                   const Grouping& grouping);

/// Bit-exact checkpoint serialization (JSON manifest, base64 little-endian
/// 32-bit float payloads).
std::string format_checkpoint(const Model<float>& model);
Model<float> parse_checkpoint(const std::string& text);
void save_model(const Model<float>& model, const std::string& path);
Model<float> load_model(const std::string& path);

template <typename T>
T smallest_preactivation_magnitude(const Model<T>& model,
                                   const Grouping& grouping) {
  // Re-runs the forward pass keeping only the minimum |pre-activation|.
  T best = std::numeric_limits<T>::infinity();
  const auto scan = [&](const Linear<T>& layer, const T* x) {
    for (int o = 0; o < layer.out; ++o) {
      T acc = layer.b[static_cast<size_t>(o)];
      const T* row = layer.w.data() + static_cast<size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) acc += row[i] * x[i];
      best = std::min(best, std::fabs(acc));
    }
  };
  const detail::Trace<T> trace = detail::forward_trace(model, grouping);
  for (size_t l = 0; l < model.sa.size(); ++l) {
    for (size_t c = 0; c < grouping.layers[l].centers.size(); ++c) {
      const int m = static_cast<int>(grouping.layers[l].groups[c].size());
      const auto& acts = trace.member_acts[l][c];
      const std::vector<T>& inputs = trace.member_inputs[l][c];
      for (size_t k = 0; k < model.sa[l].size(); ++k) {
        const int in_w = model.sa[l][k].in;
        const T* x = k == 0 ? inputs.data() : acts[k - 1].data();
        for (int j = 0; j < m; ++j) {
          scan(model.sa[l][k], x + static_cast<size_t>(j) * in_w);
        }
      }
    }
  }
  const std::vector<T>* x = &trace.global_feature;
  for (size_t k = 0; k + 1 < model.fc.size(); ++k) {
    scan(model.fc[k], x->data());
    x = &trace.fc_acts[k];
  }
  return best;
}

}  // namespace mg

#endif  // MULTIGRASP_NET_HPP
