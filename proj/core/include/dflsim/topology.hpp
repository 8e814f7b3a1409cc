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

#ifndef DFLSIM_TOPOLOGY_HPP_
#define DFLSIM_TOPOLOGY_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dflsim {

enum class TopologyKind { kFully, kRing, kStar };

std::string_view to_string(TopologyKind kind) noexcept;
// Throws InvalidInputError for names other than fully/ring/star.
TopologyKind parse_topology(std::string_view name);

// Static undirected overlay graph. The star hub is client 0.
class TopologyGraph {
 public:
  static TopologyGraph build(TopologyKind kind, std::size_t clients);

  TopologyKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return adjacency_.size(); }
  // Unordered pairs (a, b) with a < b, sorted.
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const noexcept { return edges_; }
  // Ascending neighbor ids. Throws InvalidInputError if k is out of range.
  const std::vector<std::size_t>& neighbors(std::size_t k) const;
  std::size_t degree(std::size_t k) const { return neighbors(k).size(); }
  bool connected() const;

 private:
  TopologyGraph(TopologyKind kind, std::size_t clients);
  void add_edge(std::size_t a, std::size_t b);

  TopologyKind kind_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

}  // namespace dflsim

#endif  // DFLSIM_TOPOLOGY_HPP_
