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

#include "dflsim/topology.hpp"

#include <algorithm>
#include <deque>

#include "dflsim/errors.hpp"

namespace dflsim {

std::string_view to_string(TopologyKind kind) noexcept {
  switch (kind) {
    case TopologyKind::kFully:
      return "fully";
    case TopologyKind::kRing:
      return "ring";
    case TopologyKind::kStar:
      return "star";
  }
  return "unknown";
}

TopologyKind parse_topology(std::string_view name) {
  if (name == "fully") return TopologyKind::kFully;
  if (name == "ring") return TopologyKind::kRing;
  if (name == "star") return TopologyKind::kStar;
  throw InvalidInputError("unknown topology '" + std::string(name) + "' (valid: fully, ring, star)");
}

TopologyGraph::TopologyGraph(TopologyKind kind, std::size_t clients)
    : kind_(kind), adjacency_(clients) {}

void TopologyGraph::add_edge(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  edges_.emplace_back(a, b);
  adjacency_[a].push_back(b);
  adjacency_[b].push_back(a);
}

TopologyGraph TopologyGraph::build(TopologyKind kind, std::size_t clients) {
  const std::size_t minimum = kind == TopologyKind::kRing ? 3 : 2;
  if (clients < minimum) {
    throw InvalidInputError(std::string(to_string(kind)) + " topology needs at least " +
                            std::to_string(minimum) + " clients, got " + std::to_string(clients));
  }
  TopologyGraph g(kind, clients);
  switch (kind) {
    case TopologyKind::kFully:
      for (std::size_t a = 0; a < clients; ++a) {
        for (std::size_t b = a + 1; b < clients; ++b) g.add_edge(a, b);
      }
      break;
    case TopologyKind::kRing:
      for (std::size_t a = 0; a < clients; ++a) g.add_edge(a, (a + 1) % clients);
      break;
    case TopologyKind::kStar:
      for (std::size_t a = 1; a < clients; ++a) g.add_edge(0, a);
      break;
  }
  for (auto& nbrs : g.adjacency_) std::sort(nbrs.begin(), nbrs.end());
  std::sort(g.edges_.begin(), g.edges_.end());
  return g;
}

const std::vector<std::size_t>& TopologyGraph::neighbors(std::size_t k) const {
  if (k >= adjacency_.size()) {
    throw InvalidInputError("client id " + std::to_string(k) + " out of range for " +
                            std::to_string(adjacency_.size()) + " clients");
  }
  return adjacency_[k];
}

bool TopologyGraph::connected() const {
  if (adjacency_.empty()) return true;
  std::vector<bool> seen(adjacency_.size(), false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const std::size_t k = queue.front();
    queue.pop_front();
    for (std::size_t j : adjacency_[k]) {
      if (!seen[j]) {
        seen[j] = true;
        ++reached;
        queue.push_back(j);
      }
    }
  }
  return reached == adjacency_.size();
}

}  // namespace dflsim
