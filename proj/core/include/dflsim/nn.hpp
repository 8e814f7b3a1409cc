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

#ifndef DFLSIM_NN_HPP_
#define DFLSIM_NN_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dflsim/data.hpp"
#include "dflsim/linalg.hpp"

namespace dflsim {

// Fully connected classifier: ReLU on hidden layers, softmax cross-entropy on
// the output. layer_sizes = {input, hidden..., classes}.
struct ModelSpec {
  std::vector<std::size_t> layer_sizes;

  std::size_t input_dim() const { return layer_sizes.front(); }
  std::size_t classes() const { return layer_sizes.back(); }
  std::size_t layers() const { return layer_sizes.size() - 1; }
  std::size_t param_count() const;

  // Throws InvalidInputError unless there are >= 2 positive sizes.
  void validate() const;
};

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t batch_size = 64;
  std::size_t local_epochs = 3;
  std::uint64_t seed = 0;
};

// One dense layer in structured form. weights is (fan_out x fan_in) row-major.
struct DenseLayer {
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  std::vector<double> weights;
  std::vector<double> bias;
};

// Flattening order: layer 0 weights (row-major), layer 0 bias, layer 1 weights, ...
std::vector<DenseLayer> unflatten(std::span<const double> params, const ModelSpec& spec);
ParamVector flatten(const std::vector<DenseLayer>& layers);

// Offset of layer `l`'s weights and bias inside the flat vector.
struct LayerOffsets {
  std::size_t weights;
  std::size_t bias;
};
std::vector<LayerOffsets> layer_offsets(const ModelSpec& spec);

// Glorot-uniform weights, zero biases.
ParamVector init_params(const ModelSpec& spec, std::uint64_t seed);

// Non-owning view of `size` rows of features plus labels.
struct BatchView {
  std::span<const double> features;  // size x feature_dim, row-major
  std::span<const int> labels;
  std::size_t feature_dim = 0;

  std::size_t size() const noexcept { return labels.size(); }
};

BatchView whole(const Dataset& data);

struct ForwardCache {
  // activations[0] is the input; activations[l] is the post-ReLU output of
  // layer l - 1; the last entry holds softmax probabilities.
  std::vector<std::vector<double>> activations;
  std::size_t batch = 0;
};

struct ForwardResult {
  std::vector<double> logits;  // batch x classes
  ForwardCache cache;
};

ForwardResult forward(std::span<const double> params, const ModelSpec& spec, const BatchView& batch);

// Mean softmax cross-entropy of logits against labels.
double cross_entropy(std::span<const double> logits, std::span<const int> labels,
                     std::size_t classes);

// Gradient of the mean cross-entropy over the batch, same layout as params.
ParamVector backward(std::span<const double> params, const ModelSpec& spec, const BatchView& batch,
                     const ForwardCache& cache);

// cfg.local_epochs of mini-batch SGD over `shard` (indices into `data`). The
// shuffle stream is derive_seed({cfg.seed, round}).
ParamVector local_train(std::span<const double> params, const ModelSpec& spec,
                        const Dataset& data, std::span<const std::size_t> shard,
                        const TrainConfig& cfg, std::uint64_t round = 0);

struct Metrics {
  double loss = 0.0;
  double accuracy = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;  // per-class F1 weighted by label support
  std::vector<std::vector<std::size_t>> confusion;  // [label][prediction]
};

// Classification metrics from predictions; zero denominators give 0.
Metrics classification_metrics(std::span<const int> labels, std::span<const int> predictions,
                               std::size_t classes);

Metrics evaluate(std::span<const double> params, const ModelSpec& spec, const Dataset& test);

}  // namespace dflsim

#endif  // DFLSIM_NN_HPP_
