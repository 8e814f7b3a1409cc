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

#ifndef DFLSIM_DATA_HPP_
#define DFLSIM_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace dflsim {

// N examples of F real features each, row-major, with labels in [0, classes).
struct Dataset {
  std::size_t feature_dim = 0;
  std::size_t classes = 0;
  std::vector<double> features;
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const double> row(std::size_t i) const noexcept {
    return {features.data() + i * feature_dim, feature_dim};
  }

  // Throws InvalidInputError if any invariant is broken.
  void validate() const;
};

// One index list per client; disjoint, together a permutation of [0, N).
struct PartitionPlan {
  std::vector<std::vector<std::size_t>> shards;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

struct IdxHeader {
  std::uint32_t magic = 0;
  std::vector<std::uint32_t> dims;
};

// Reads the magic and dimension sizes. The stream is left at the payload.
IdxHeader read_idx_header(std::istream& in, std::uint32_t expected_magic);

// Parses an IDX image/label file pair. Pixels are scaled by 1/255.
// `classes` of 0 means max(label) + 1.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 std::size_t classes = 0);

// Writes features (quantized to round(255 x), clamped to [0, 255]) as a
// rows x cols image file and labels as a label file.
void write_idx(const Dataset& data, std::size_t rows, std::size_t cols,
               const std::filesystem::path& images, const std::filesystem::path& labels);

// Gaussian clusters with standard deviation `spread`, one per class, around
// centers placed on signed, seeded coordinate axes at distance
// kBlobCenterRadius from the origin. Examples are ordered class-major.
Dataset synth_blobs(std::size_t classes, std::size_t per_class, std::size_t feature_dim,
                    double spread, std::uint64_t seed);

inline constexpr double kBlobCenterRadius = 2.0;

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

// Same clusters for both splits: the first `train_per_class` examples of
// every class go to train, the rest to test.
TrainTestSplit synth_blobs_split(std::size_t classes, std::size_t train_per_class,
                                 std::size_t test_per_class, std::size_t feature_dim,
                                 double spread, std::uint64_t seed);

// Rows `indices` of `data`, in the given order.
Dataset subset(const Dataset& data, std::span<const std::size_t> indices);

// Seeded global shuffle then round-robin deal into k shards.
PartitionPlan partition_iid(const Dataset& data, std::size_t k, std::uint64_t seed);
PartitionPlan partition_iid(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace dflsim

#endif  // DFLSIM_DATA_HPP_
