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


// Scalar re-derivation of the dense network's forward pass and mean
// cross-entropy, independent of the library's batched kernels.

#ifndef DFLSIM_TESTS_NN_ORACLE_HPP_
#define DFLSIM_TESTS_NN_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "dflsim/data.hpp"
#include "dflsim/nn.hpp"

namespace oracle {

inline double scalar_loss(const dflsim::ParamVector& p, const dflsim::ModelSpec& spec, const dflsim::Dataset& d) {
  double total = 0.0;
  for (std::size_t r = 0; r < d.size(); ++r) {
    std::vector<double> x(d.row(r).begin(), d.row(r).end());
    std::size_t at = 0;
    for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
      const std::size_t in = spec.layer_sizes[l], out = spec.layer_sizes[l + 1];
      std::vector<double> z(out);
      for (std::size_t o = 0; o < out; ++o) {
        z[o] = p[at + in * out + o];
        for (std::size_t i = 0; i < in; ++i) z[o] += p[at + o * in + i] * x[i];
        if (l + 2 < spec.layer_sizes.size()) z[o] = std::max(0.0, z[o]);
      }
      at += in * out + out;
      x = z;
    }
    const double zmax = *std::max_element(x.begin(), x.end());
    double s = 0.0;
    for (double v : x) s += std::exp(v - zmax);
    total += -(x[d.labels[r]] - zmax - std::log(s));
  }
  return total / static_cast<double>(d.size());
}

}  // namespace oracle

#endif  // DFLSIM_TESTS_NN_ORACLE_HPP_
