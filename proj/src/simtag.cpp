#include "sdgmap/simtag.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

namespace sdgmap {

GoalVectorCache compute_goal_vectors(const SdgCorpus& corpus,
                                     EmbeddingProvider& provider) {
  std::vector<std::string> documents;
  documents.reserve(SdgCorpus::kGoalCount);
  for (const Goal& goal : corpus.goals()) {
    documents.push_back(goal_document(corpus, goal.number));
  }
  std::vector<Vector> vectors = provider.embed(documents);

  GoalVectorCache cache;
  cache.provider_identity = provider.identity();
  cache.dim = provider.dim();
  for (std::size_t i = 0; i < corpus.goals().size(); ++i) {
    cache.vectors[corpus.goals()[i].number] = std::move(vectors[i]);
  }
  return cache;
}

void save_goal_vectors(const std::filesystem::path& path,
                       const GoalVectorCache& cache) {
  nlohmann::ordered_json doc;
  doc["provider"] = cache.provider_identity;
  doc["dim"] = cache.dim;
  nlohmann::ordered_json vectors = nlohmann::ordered_json::object();
  for (const auto& [goal, vec] : cache.vectors) {
    vectors[std::to_string(goal)] = vec.values;
  }
  doc["vectors"] = std::move(vectors);

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open goal-vector cache for writing: " + path.string());
  }
  out << doc.dump(2) << '\n';
}

GoalVectorCache load_goal_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open goal-vector cache: " + path.string());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("goal-vector cache is not valid JSON: " + std::string(e.what()));
  }

  GoalVectorCache cache;
  try {
    cache.provider_identity = doc.at("provider").get<std::string>();
    cache.dim = doc.at("dim").get<std::size_t>();
    for (const auto& [key, values] : doc.at("vectors").items()) {
      Vector vec;
      vec.values = values.get<std::vector<double>>();
      cache.vectors[std::stoi(key)] = std::move(vec);
    }
  } catch (const std::exception& e) {
    throw Error("goal-vector cache has unexpected layout: " +
                std::string(e.what()));
  }
  for (const auto& [goal, vec] : cache.vectors) {
    if (vec.dim() != cache.dim) {
      throw DimensionMismatch("cached vector for goal " + std::to_string(goal) +
                              " has dim " + std::to_string(vec.dim()) +
                              ", cache says " + std::to_string(cache.dim));
    }
  }
  return cache;
}

SdgScoreVector score_vector(const std::string& publication_id,
                            const Vector& publication_vector,
                            const GoalVectorCache& cache) {
  SdgScoreVector result;
  result.publication_id = publication_id;
  for (int goal = 1; goal <= SdgCorpus::kGoalCount; ++goal) {
    auto it = cache.vectors.find(goal);
    if (it == cache.vectors.end()) {
      throw MissingGoalVector("goal " + std::to_string(goal) +
                              " missing from vector cache");
    }
    result.scores[goal] = cosine_similarity(publication_vector, it->second);
  }
  return result;
}

SdgScoreVector score_publication(EmbeddingProvider& provider,
                                 const GoalVectorCache& goal_vectors,
                                 const Publication& pub) {
  const std::string text = publication_text(pub);
  std::vector<Vector> embedded = provider.embed(std::span(&text, 1));
  return score_vector(pub.id, embedded.front(), goal_vectors);
}

TagResult apply_threshold(const SdgScoreVector& scores, double threshold,
                          bool inclusive) {
  TagResult result;
  result.publication_id = scores.publication_id;
  result.threshold = threshold;
  for (const auto& [goal, score] : scores.scores) {
    const bool passes = inclusive ? score >= threshold : score > threshold;
    if (passes) result.tags.push_back({goal, score});
  }
  std::stable_sort(result.tags.begin(), result.tags.end(),
                   [](const TaggedGoal& a, const TaggedGoal& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.goal < b.goal;
                   });
  return result;
}

std::vector<HistogramBin> score_histogram(std::span<const double> scores,
                                          double bin_width) {
  if (!(bin_width > 0.0) || bin_width > 1.0) {
    throw Error("histogram bin width must lie in (0, 1]");
  }
  const int bins = static_cast<int>(std::ceil(2.0 / bin_width));
  auto lower_edge = [&](int k) { return -1.0 + k * bin_width; };

  std::vector<HistogramBin> hist(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k) {
    hist[static_cast<std::size_t>(k)].lower = lower_edge(k);
  }
  for (double s : scores) {
    if (s < -1.0) s = -1.0;
    if (s > 1.0) s = 1.0;
    int k = static_cast<int>(std::floor((s + 1.0) / bin_width));
    // floor() on the scaled value can land one bin off at an edge; nudge so
    // bin membership always agrees with direct edge comparison.
    while (k > 0 && s < lower_edge(k)) --k;
    while (k + 1 < bins && s >= lower_edge(k + 1)) ++k;
    if (k >= bins) k = bins - 1;  // the final bin is closed above
    if (k < 0) k = 0;
    ++hist[static_cast<std::size_t>(k)].count;
  }
  return hist;
}

std::map<int, std::map<std::string, std::size_t>> goal_distribution(
    std::span<const TagResult> results, std::span<const Publication> pubs) {
  std::unordered_map<std::string, const Publication*> by_id;
  by_id.reserve(pubs.size());
  for (const Publication& pub : pubs) by_id[pub.id] = &pub;

  std::map<int, std::map<std::string, std::size_t>> dist;
  for (const TagResult& result : results) {
    auto it = by_id.find(result.publication_id);
    if (it == by_id.end()) {
      throw UnknownPublication("tag result references unknown publication \"" +
                               result.publication_id + "\"");
    }
    for (const TaggedGoal& tag : result.tags) {
      ++dist[tag.goal][it->second->pub_type];
    }
  }
  return dist;
}

}  // namespace sdgmap
