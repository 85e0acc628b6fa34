#include "sdgmap/hybrid.hpp"

#include <algorithm>
#include <iterator>
#include <unordered_set>
#include <vector>

namespace sdgmap {

ConnectionSet to_connections(std::span<const TagResult> results) {
  ConnectionSet set;
  for (const TagResult& result : results) {
    for (const TaggedGoal& tag : result.tags) {
      set.insert({result.publication_id, tag.goal});
    }
  }
  return set;
}

ConnectionSet to_connections(std::span<const LlmTagResult> results) {
  ConnectionSet set;
  for (const LlmTagResult& result : results) {
    for (const GoalAssignment& assignment : result.assignments) {
      set.insert({result.publication_id, assignment.goal});
    }
  }
  return set;
}

ConnectionSet intersect(const ConnectionSet& a, const ConnectionSet& b) {
  ConnectionSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.end()));
  return out;
}

ConsensusStats consensus_stats(const ConnectionSet& a, const ConnectionSet& b,
                               std::size_t total_publications) {
  ConsensusStats stats;
  stats.size_a = a.size();
  stats.size_b = b.size();

  const ConnectionSet common = intersect(a, b);
  stats.size_intersection = common.size();
  stats.size_union = a.size() + b.size() - common.size();
  stats.share_of_union =
      stats.size_union == 0
          ? 0.0
          : static_cast<double>(stats.size_intersection) /
                static_cast<double>(stats.size_union);

  std::unordered_set<std::string> consensus_ids;
  for (const Connection& connection : common) {
    consensus_ids.insert(connection.publication_id);
  }
  stats.consensus_publications = consensus_ids.size();
  stats.consensus_publication_share =
      total_publications == 0
          ? 0.0
          : static_cast<double>(stats.consensus_publications) /
                static_cast<double>(total_publications);
  return stats;
}

CooccurrenceGraph cooccurrence_graph(const ConnectionSet& connections) {
  CooccurrenceGraph graph;

  // The set is ordered by publication id, so each publication's goals form a
  // contiguous run.
  auto it = connections.begin();
  while (it != connections.end()) {
    const std::string& pub = it->publication_id;
    std::vector<int> goals;
    for (; it != connections.end() && it->publication_id == pub; ++it) {
      goals.push_back(it->goal);
    }
    for (std::size_t i = 0; i < goals.size(); ++i) {
      ++graph.nodes[goals[i]];
      for (std::size_t j = i + 1; j < goals.size(); ++j) {
        ++graph.edges[GoalPair(goals[i], goals[j])];
      }
    }
  }
  return graph;
}

}  // namespace sdgmap
