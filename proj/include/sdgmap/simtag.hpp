#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sdgmap/corpus.hpp"
#include "sdgmap/embed.hpp"
#include "sdgmap/ingest.hpp"

namespace sdgmap {

// All 17 goal scores for one publication, keyed by goal number.
struct SdgScoreVector {
  std::string publication_id;
  std::map<int, double> scores;
};

struct TaggedGoal {
  int goal = 0;
  double score = 0.0;

  bool operator==(const TaggedGoal&) const = default;
};

// Goals a publication kept after thresholding, strongest first; equal scores
// break ties toward the lower goal number.
struct TagResult {
  std::string publication_id;
  std::vector<TaggedGoal> tags;
  double threshold = 0.0;
};

// One embedding per goal, stamped with the provider that produced it so a
// cache is never reused across providers or dimensions.
struct GoalVectorCache {
  std::string provider_identity;
  std::size_t dim = 0;
  std::map<int, Vector> vectors;
};

GoalVectorCache compute_goal_vectors(const SdgCorpus& corpus,
                                     EmbeddingProvider& provider);
void save_goal_vectors(const std::filesystem::path& path,
                       const GoalVectorCache& cache);
GoalVectorCache load_goal_vectors(const std::filesystem::path& path);

// Cosine of an already-embedded publication against every cached goal vector.
// Throws MissingGoalVector when the cache lacks any of goals 1..17.
SdgScoreVector score_vector(const std::string& publication_id,
                            const Vector& publication_vector,
                            const GoalVectorCache& cache);

// Embeds publication_text(pub) through the provider, then scores it.
SdgScoreVector score_publication(EmbeddingProvider& provider,
                                 const GoalVectorCache& goal_vectors,
                                 const Publication& pub);

// Goals at or above (or strictly above, when inclusive is false) the
// threshold, ordered as TagResult requires. Empty tags mean the publication
// is not SDG-related at this threshold.
TagResult apply_threshold(const SdgScoreVector& scores, double threshold,
                          bool inclusive = true);

// Equal-width bins spanning [-1, 1]. A score on an interior upper edge falls
// into the higher bin; the final bin also includes its upper edge.
struct HistogramBin {
  double lower = 0.0;
  std::size_t count = 0;

  bool operator==(const HistogramBin&) const = default;
};

std::vector<HistogramBin> score_histogram(std::span<const double> scores,
                                          double bin_width);

// Per-goal counts of tagged publications broken down by publication type.
// A publication with k tags contributes to k goals. Throws UnknownPublication
// when a result's id has no matching publication.
std::map<int, std::map<std::string, std::size_t>> goal_distribution(
    std::span<const TagResult> results, std::span<const Publication> pubs);

}  // namespace sdgmap
