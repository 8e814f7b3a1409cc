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

#include "dflsim/data.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <string>

#include "dflsim/errors.hpp"
#include "dflsim/rng.hpp"

namespace dflsim {

void Dataset::validate() const {
  if (labels.empty()) throw InvalidInputError("Dataset: no examples");
  if (feature_dim == 0) throw InvalidInputError("Dataset: feature_dim is zero");
  if (features.size() != labels.size() * feature_dim) {
    throw InvalidInputError("Dataset: feature matrix does not match label count");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw InvalidInputError("Dataset: label " + std::to_string(y) + " outside [0, " +
                              std::to_string(classes) + ")");
    }
  }
  for (double x : features) {
    if (!std::isfinite(x)) throw InvalidInputError("Dataset: non-finite feature");
  }
}

namespace {

std::uint32_t read_be32(std::istream& in, const char* what) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw FormatError(std::string("IDX: truncated header while reading ") + what);
  }
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

void write_be32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                              static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b.data(), 4);
}

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::vector<unsigned char> read_payload(std::istream& in, std::size_t bytes,
                                        const std::filesystem::path& path) {
  // Check the size first so a corrupted dimension cannot trigger a huge allocation.
  const auto here = in.tellg();
  in.seekg(0, std::ios::end);
  const auto available = static_cast<std::size_t>(in.tellg() - here);
  in.seekg(here);
  if (available < bytes) {
    throw FormatError("IDX: truncated payload in " + path.string() + " (expected " +
                      std::to_string(bytes) + " bytes, got " + std::to_string(available) + ")");
  }
  std::vector<unsigned char> buf(bytes);
  if (bytes > 0 && !in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes))) {
    throw FormatError("IDX: truncated payload in " + path.string() + " (expected " +
                      std::to_string(bytes) + " bytes, got " + std::to_string(in.gcount()) + ")");
  }
  return buf;
}

}  // namespace

IdxHeader read_idx_header(std::istream& in, std::uint32_t expected_magic) {
  IdxHeader h;
  h.magic = read_be32(in, "magic");
  if (h.magic != expected_magic) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "IDX: bad magic 0x%08X, expected 0x%08X", h.magic, expected_magic);
    throw FormatError(buf);
  }
  const std::uint32_t ndims = h.magic & 0xFF;
  for (std::uint32_t i = 0; i < ndims; ++i) h.dims.push_back(read_be32(in, "dimension size"));
  return h;
}

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 std::size_t classes) {
  auto img_in = open_binary(images);
  const IdxHeader ih = read_idx_header(img_in, kIdxImageMagic);
  auto lbl_in = open_binary(labels);
  const IdxHeader lh = read_idx_header(lbl_in, kIdxLabelMagic);

  const std::size_t n = ih.dims[0];
  const std::size_t feature_dim = std::size_t{ih.dims[1]} * ih.dims[2];
  if (lh.dims[0] != n) {
    throw ConsistencyError("IDX: " + std::to_string(n) + " images but " +
                           std::to_string(lh.dims[0]) + " labels");
  }

  const auto pixels = read_payload(img_in, n * feature_dim, images);
  const auto raw_labels = read_payload(lbl_in, n, labels);

  Dataset d;
  d.feature_dim = feature_dim;
  d.features.resize(pixels.size());
  std::transform(pixels.begin(), pixels.end(), d.features.begin(),
                 [](unsigned char p) { return static_cast<double>(p) / 255.0; });
  d.labels.assign(raw_labels.begin(), raw_labels.end());
  const int max_label = d.labels.empty() ? 0 : *std::max_element(d.labels.begin(), d.labels.end());
  d.classes = classes != 0 ? classes : static_cast<std::size_t>(max_label) + 1;
  d.validate();
  return d;
}

void write_idx(const Dataset& data, std::size_t rows, std::size_t cols,
               const std::filesystem::path& images, const std::filesystem::path& labels) {
  if (rows * cols != data.feature_dim) {
    throw InvalidInputError("write_idx: rows*cols must equal the feature dimension");
  }
  std::ofstream img(images, std::ios::binary);
  std::ofstream lbl(labels, std::ios::binary);
  if (!img || !lbl) throw IoError("write_idx: cannot open output files");

  write_be32(img, kIdxImageMagic);
  write_be32(img, static_cast<std::uint32_t>(data.size()));
  write_be32(img, static_cast<std::uint32_t>(rows));
  write_be32(img, static_cast<std::uint32_t>(cols));
  for (double x : data.features) {
    const double q = std::clamp(std::round(x * 255.0), 0.0, 255.0);
    img.put(static_cast<char>(static_cast<unsigned char>(q)));
  }

  write_be32(lbl, kIdxLabelMagic);
  write_be32(lbl, static_cast<std::uint32_t>(data.size()));
  for (int y : data.labels) lbl.put(static_cast<char>(static_cast<unsigned char>(y)));
  if (!img || !lbl) throw IoError("write_idx: write failed");
}

Dataset synth_blobs(std::size_t classes, std::size_t per_class, std::size_t feature_dim,
                    double spread, std::uint64_t seed) {
  if (classes == 0 || per_class == 0 || feature_dim == 0) {
    throw InvalidInputError("synth_blobs: counts must be positive");
  }
  if (spread < 0.0) throw InvalidInputError("synth_blobs: spread must be non-negative");

  Rng rng(derive_seed({seed, 0xB10B5ULL}));
  std::vector<std::size_t> axes(feature_dim);
  std::iota(axes.begin(), axes.end(), 0);
  rng.shuffle(axes.begin(), axes.end());

  std::vector<std::vector<double>> centers(classes, std::vector<double>(feature_dim, 0.0));
  for (std::size_t c = 0; c < classes; ++c) {
    const double sign = (rng() & 1) ? 1.0 : -1.0;
    if (c < feature_dim) {
      centers[c][axes[c]] = sign * kBlobCenterRadius;
      continue;
    }
    // More classes than axes: random directions on the same sphere.
    double nrm = 0.0;
    for (double& x : centers[c]) {
      x = rng.normal();
      nrm += x * x;
    }
    nrm = std::sqrt(nrm);
    for (double& x : centers[c]) x *= kBlobCenterRadius / nrm;
  }

  Dataset d;
  d.feature_dim = feature_dim;
  d.classes = classes;
  d.features.reserve(classes * per_class * feature_dim);
  d.labels.reserve(classes * per_class);
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      for (std::size_t f = 0; f < feature_dim; ++f) {
        d.features.push_back(centers[c][f] + spread * rng.normal());
      }
      d.labels.push_back(static_cast<int>(c));
    }
  }
  return d;
}

Dataset subset(const Dataset& data, std::span<const std::size_t> indices) {
  Dataset out;
  out.feature_dim = data.feature_dim;
  out.classes = data.classes;
  out.features.reserve(indices.size() * data.feature_dim);
  out.labels.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= data.size()) throw InvalidInputError("subset: index out of range");
    const auto r = data.row(idx);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(data.labels[idx]);
  }
  return out;
}

TrainTestSplit synth_blobs_split(std::size_t classes, std::size_t train_per_class,
                                 std::size_t test_per_class, std::size_t feature_dim,
                                 double spread, std::uint64_t seed) {
  if (train_per_class == 0 || test_per_class == 0) {
    throw InvalidInputError("synth_blobs_split: split sizes must be positive");
  }
  const std::size_t per_class = train_per_class + test_per_class;
  const Dataset all = synth_blobs(classes, per_class, feature_dim, spread, seed);
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      (i < train_per_class ? train_idx : test_idx).push_back(c * per_class + i);
    }
  }
  return {subset(all, train_idx), subset(all, test_idx)};
}

PartitionPlan partition_iid(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw InvalidInputError("partition_iid: need at least one shard");
  if (k > n) {
    throw InvalidInputError("partition_iid: " + std::to_string(k) + " shards for " +
                            std::to_string(n) + " examples");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed({seed, 0x5AA4DULL}));
  rng.shuffle(perm.begin(), perm.end());

  PartitionPlan plan;
  plan.shards.resize(k);
  for (std::size_t i = 0; i < n; ++i) plan.shards[i % k].push_back(perm[i]);
  return plan;
}

PartitionPlan partition_iid(const Dataset& data, std::size_t k, std::uint64_t seed) {
  return partition_iid(data.size(), k, seed);
}

}  // namespace dflsim
