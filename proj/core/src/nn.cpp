/*
 * Copyright 2026 The dflsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dflsim/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dflsim/errors.hpp"
#include "dflsim/rng.hpp"

namespace dflsim {

std::size_t ModelSpec::param_count() const {
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    total += layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
  }
  return total;
}

void ModelSpec::validate() const {
  if (layer_sizes.size() < 2) throw InvalidInputError("ModelSpec: need at least input and output sizes");
  for (std::size_t s : layer_sizes) {
    if (s == 0) throw InvalidInputError("ModelSpec: layer sizes must be positive");
  }
}

std::vector<LayerOffsets> layer_offsets(const ModelSpec& spec) {
  std::vector<LayerOffsets> out;
  std::size_t at = 0;
  for (std::size_t l = 0; l < spec.layers(); ++l) {
    const std::size_t w = spec.layer_sizes[l] * spec.layer_sizes[l + 1];
    out.push_back({at, at + w});
    at += w + spec.layer_sizes[l + 1];
  }
  return out;
}

std::vector<DenseLayer> unflatten(std::span<const double> params, const ModelSpec& spec) {
  spec.validate();
  if (params.size() != spec.param_count()) {
    throw InvalidInputError("unflatten: expected " + std::to_string(spec.param_count()) +
                            " parameters, got " + std::to_string(params.size()));
  }
  std::vector<DenseLayer> layers;
  const auto offsets = layer_offsets(spec);
  for (std::size_t l = 0; l < spec.layers(); ++l) {
    DenseLayer layer;
    layer.fan_in = spec.layer_sizes[l];
    layer.fan_out = spec.layer_sizes[l + 1];
    const auto w = params.subspan(offsets[l].weights, layer.fan_in * layer.fan_out);
    const auto b = params.subspan(offsets[l].bias, layer.fan_out);
    layer.weights.assign(w.begin(), w.end());
    layer.bias.assign(b.begin(), b.end());
    layers.push_back(std::move(layer));
  }
  return layers;
}

ParamVector flatten(const std::vector<DenseLayer>& layers) {
  ParamVector out;
  for (const auto& layer : layers) {
    out.insert(out.end(), layer.weights.begin(), layer.weights.end());
    out.insert(out.end(), layer.bias.begin(), layer.bias.end());
  }
  return out;
}

ParamVector init_params(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  ParamVector params(spec.param_count(), 0.0);
  Rng rng(derive_seed({seed, 0x1A17ULL}));
  const auto offsets = layer_offsets(spec);
  for (std::size_t l = 0; l < spec.layers(); ++l) {
    const std::size_t fan_in = spec.layer_sizes[l];
    const std::size_t fan_out = spec.layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t k = 0; k < fan_in * fan_out; ++k) {
      params[offsets[l].weights + k] = rng.uniform(-limit, limit);
    }
  }
  return params;
}

BatchView whole(const Dataset& data) {
  return {data.features, data.labels, data.feature_dim};
}

namespace {

void check_batch(std::span<const double> params, const ModelSpec& spec, const BatchView& batch) {
  spec.validate();
  if (params.size() != spec.param_count()) {
    throw InvalidInputError("forward: parameter vector has length " + std::to_string(params.size()) +
                            ", model needs " + std::to_string(spec.param_count()));
  }
  if (batch.feature_dim != spec.input_dim()) {
    throw InvalidInputError("forward: batch has " + std::to_string(batch.feature_dim) +
                            " features, model expects " + std::to_string(spec.input_dim()));
  }
  if (batch.features.size() != batch.size() * batch.feature_dim) {
    throw InvalidInputError("forward: feature buffer does not match batch size");
  }
}

void softmax_rows(std::span<const double> logits, std::size_t classes, std::vector<double>& out) {
  out.resize(logits.size());
  for (std::size_t r = 0; r < logits.size() / classes; ++r) {
    const double* z = logits.data() + r * classes;
    double* p = out.data() + r * classes;
    const double zmax = *std::max_element(z, z + classes);
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      p[c] = std::exp(z[c] - zmax);
      sum += p[c];
    }
    for (std::size_t c = 0; c < classes; ++c) p[c] /= sum;
  }
}

}  // namespace

ForwardResult forward(std::span<const double> params, const ModelSpec& spec, const BatchView& batch) {
  check_batch(params, spec, batch);
  const std::size_t n = batch.size();
  const auto offsets = layer_offsets(spec);

  ForwardResult result;
  result.cache.batch = n;
  result.cache.activations.emplace_back(batch.features.begin(), batch.features.end());

  for (std::size_t l = 0; l < spec.layers(); ++l) {
    const std::size_t in = spec.layer_sizes[l];
    const std::size_t out = spec.layer_sizes[l + 1];
    const double* w = params.data() + offsets[l].weights;
    const double* b = params.data() + offsets[l].bias;
    const std::vector<double>& x = result.cache.activations.back();
    std::vector<double> z(n * out);
    for (std::size_t r = 0; r < n; ++r) {
      const double* xr = x.data() + r * in;
      for (std::size_t o = 0; o < out; ++o) {
        const double* wo = w + o * in;
        double s = b[o];
        for (std::size_t i = 0; i < in; ++i) s += wo[i] * xr[i];
        z[r * out + o] = s;
      }
    }
    if (l + 1 < spec.layers()) {
      for (double& v : z) v = std::max(v, 0.0);
      result.cache.activations.push_back(std::move(z));
    } else {
      result.logits = std::move(z);
    }
  }
  std::vector<double> probs;
  softmax_rows(result.logits, spec.classes(), probs);
  result.cache.activations.push_back(std::move(probs));
  return result;
}

double cross_entropy(std::span<const double> logits, std::span<const int> labels,
                     std::size_t classes) {
  if (labels.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    const double* z = logits.data() + r * classes;
    const double zmax = *std::max_element(z, z + classes);
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) sum += std::exp(z[c] - zmax);
    total += zmax + std::log(sum) - z[labels[r]];
  }
  return total / static_cast<double>(labels.size());
}

ParamVector backward(std::span<const double> params, const ModelSpec& spec, const BatchView& batch,
                     const ForwardCache& cache) {
  check_batch(params, spec, batch);
  const std::size_t n = batch.size();
  if (cache.batch != n || cache.activations.size() != spec.layers() + 1) {
    throw InvalidInputError("backward: cache does not come from a matching forward call");
  }
  const auto offsets = layer_offsets(spec);
  ParamVector grad(params.size(), 0.0);

  // dL/dz for the output layer of the batch-mean cross-entropy.
  const std::size_t classes = spec.classes();
  std::vector<double> delta = cache.activations.back();
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    delta[r * classes + static_cast<std::size_t>(batch.labels[r])] -= 1.0;
  }
  for (double& v : delta) v *= inv_n;

  for (std::size_t l = spec.layers(); l-- > 0;) {
    const std::size_t in = spec.layer_sizes[l];
    const std::size_t out = spec.layer_sizes[l + 1];
    const std::vector<double>& x = cache.activations[l];
    double* gw = grad.data() + offsets[l].weights;
    double* gb = grad.data() + offsets[l].bias;
    for (std::size_t r = 0; r < n; ++r) {
      const double* xr = x.data() + r * in;
      const double* dr = delta.data() + r * out;
      for (std::size_t o = 0; o < out; ++o) {
        gb[o] += dr[o];
        double* gwo = gw + o * in;
        for (std::size_t i = 0; i < in; ++i) gwo[i] += dr[o] * xr[i];
      }
    }
    if (l == 0) break;
    const double* w = params.data() + offsets[l].weights;
    std::vector<double> prev(n * in, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const double* xr = x.data() + r * in;
      const double* dr = delta.data() + r * out;
      double* pr = prev.data() + r * in;
      for (std::size_t o = 0; o < out; ++o) {
        const double* wo = w + o * in;
        for (std::size_t i = 0; i < in; ++i) pr[i] += dr[o] * wo[i];
      }
      for (std::size_t i = 0; i < in; ++i) {
        if (xr[i] <= 0.0) pr[i] = 0.0;
      }
    }
    delta = std::move(prev);
  }
  return grad;
}

ParamVector local_train(std::span<const double> params, const ModelSpec& spec,
                        const Dataset& data, std::span<const std::size_t> shard,
                        const TrainConfig& cfg, std::uint64_t round) {
  if (shard.empty()) throw InvalidInputError("local_train: empty shard");
  if (!(cfg.learning_rate >= 0.0) || cfg.batch_size == 0) {
    throw InvalidInputError("local_train: learning rate must be >= 0 and batch size positive");
  }
  ParamVector w(params.begin(), params.end());
  Rng rng(derive_seed({cfg.seed, round}));
  std::vector<std::size_t> order(shard.begin(), shard.end());
  std::vector<double> feats;
  std::vector<int> labels;
  for (std::size_t epoch = 0; epoch < cfg.local_epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      feats.clear();
      labels.clear();
      for (std::size_t k = start; k < stop; ++k) {
        const auto row = data.row(order[k]);
        feats.insert(feats.end(), row.begin(), row.end());
        labels.push_back(data.labels[order[k]]);
      }
      const BatchView batch{feats, labels, data.feature_dim};
      const ForwardResult fwd = forward(w, spec, batch);
      const ParamVector g = backward(w, spec, batch, fwd.cache);
      for (std::size_t j = 0; j < w.size(); ++j) w[j] -= cfg.learning_rate * g[j];
    }
  }
  return w;
}

Metrics classification_metrics(std::span<const int> labels, std::span<const int> predictions,
                               std::size_t classes) {
  if (labels.empty()) throw InvalidInputError("classification_metrics: no examples");
  if (labels.size() != predictions.size()) {
    throw InvalidInputError("classification_metrics: label/prediction count mismatch");
  }
  if (classes == 0) throw InvalidInputError("classification_metrics: zero classes");
  const auto in_range = [classes](int v) { return v >= 0 && static_cast<std::size_t>(v) < classes; };
  Metrics m;
  m.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!in_range(labels[i]) || !in_range(predictions[i])) {
      throw InvalidInputError("classification_metrics: class id out of range at example " + std::to_string(i));
    }
    m.confusion[labels[i]][predictions[i]]++;
    if (labels[i] == predictions[i]) ++correct;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
  m.precision.assign(classes, 0.0);
  m.recall.assign(classes, 0.0);
  m.f1.assign(classes, 0.0);
  for (std::size_t c = 0; c < classes; ++c) {
    std::size_t predicted = 0;
    std::size_t actual = 0;
    for (std::size_t k = 0; k < classes; ++k) {
      predicted += m.confusion[k][c];
      actual += m.confusion[c][k];
    }
    const double tp = static_cast<double>(m.confusion[c][c]);
    if (predicted > 0) m.precision[c] = tp / static_cast<double>(predicted);
    if (actual > 0) m.recall[c] = tp / static_cast<double>(actual);
    const double denom = m.precision[c] + m.recall[c];
    if (denom > 0.0) m.f1[c] = 2.0 * m.precision[c] * m.recall[c] / denom;
    m.macro_f1 += m.f1[c];
    m.weighted_f1 += m.f1[c] * static_cast<double>(actual);
  }
  m.macro_f1 /= static_cast<double>(classes);
  m.weighted_f1 /= static_cast<double>(labels.size());
  return m;
}

Metrics evaluate(std::span<const double> params, const ModelSpec& spec, const Dataset& test) {
  if (test.size() == 0) throw InvalidInputError("evaluate: empty test set");
  constexpr std::size_t kChunk = 1024;
  std::vector<int> predictions(test.size());
  const std::size_t classes = spec.classes();
  double loss_sum = 0.0;
  for (std::size_t start = 0; start < test.size(); start += kChunk) {
    const std::size_t count = std::min(kChunk, test.size() - start);
    const BatchView chunk{
        std::span<const double>(test.features).subspan(start * test.feature_dim, count * test.feature_dim),
        std::span<const int>(test.labels).subspan(start, count), test.feature_dim};
    const ForwardResult fwd = forward(params, spec, chunk);
    loss_sum += cross_entropy(fwd.logits, chunk.labels, classes) * static_cast<double>(count);
    for (std::size_t r = 0; r < count; ++r) {
      const double* z = fwd.logits.data() + r * classes;
      predictions[start + r] = static_cast<int>(std::max_element(z, z + classes) - z);
    }
  }
  Metrics m = classification_metrics(test.labels, predictions, classes);
  m.loss = loss_sum / static_cast<double>(test.size());
  return m;
}

}  // namespace dflsim
