#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>

#include "sdgmap/llmtag.hpp"
#include "sdgmap/simtag.hpp"

namespace sdgmap {

// One asserted (publication, goal) relevance pair.
struct Connection {
  std::string publication_id;
  int goal = 0;

  auto operator<=>(const Connection&) const = default;
};

using ConnectionSet = std::set<Connection>;

ConnectionSet to_connections(std::span<const TagResult> results);
ConnectionSet to_connections(std::span<const LlmTagResult> results);

ConnectionSet intersect(const ConnectionSet& a, const ConnectionSet& b);

struct ConsensusStats {
  std::size_t size_a = 0;
  std::size_t size_b = 0;
  std::size_t size_intersection = 0;
  std::size_t size_union = 0;
  double share_of_union = 0.0;  // intersection / union
  // Publications where the two methods agree on at least one tag.
  std::size_t consensus_publications = 0;
  double consensus_publication_share = 0.0;  // over the supplied denominator
};

// total_publications is the caller's denominator for the publication share;
// it must cover every distinct id appearing in either set.
ConsensusStats consensus_stats(const ConnectionSet& a, const ConnectionSet& b,
                               std::size_t total_publications);

// Unordered goal pair, stored with the smaller number first.
struct GoalPair {
  int a = 0;
  int b = 0;

  GoalPair() = default;
  GoalPair(int x, int y) : a(std::min(x, y)), b(std::max(x, y)) {}

  auto operator<=>(const GoalPair&) const = default;
};

struct CooccurrenceGraph {
  std::map<int, std::size_t> nodes;        // goal -> publications tagged g
  std::map<GoalPair, std::size_t> edges;   // {g,h} -> publications tagged both
};

CooccurrenceGraph cooccurrence_graph(const ConnectionSet& connections);

}  // namespace sdgmap
