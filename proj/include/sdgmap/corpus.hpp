#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sdgmap/errors.hpp"

namespace sdgmap {

struct Indicator {
  std::string code;  // "<goal>.<seq>.<seq>", e.g. "7.1.1" or "7.b.1"
  std::string text;
};

struct Target {
  std::string code;  // "<goal>.<seq>", e.g. "7.1" or "7.a"
  std::string text;
  std::vector<Indicator> indicators;
};

struct Goal {
  int number = 0;  // 1..17
  std::string name;
  std::string description;
  std::vector<Target> targets;
};

/// The 17-goal taxonomy with nested targets and indicators. Validated on
/// construction and immutable afterwards, so concurrent reads are safe.
class SdgCorpus {
 public:
  static constexpr int kGoalCount = 17;

  /// Validates the invariants: exactly 17 goals numbered 1..17 with no gaps,
  /// non-empty names, target codes prefixed by their goal number, indicator
  /// codes prefixed by their target code, no duplicate codes.
  /// Throws InvalidCorpus on any violation.
  explicit SdgCorpus(std::vector<Goal> goals);

  const std::vector<Goal>& goals() const { return goals_; }

  /// Looks up a goal by its number. Throws UnknownGoal when outside 1..17.
  const Goal& goal(int number) const;

 private:
  std::vector<Goal> goals_;
  std::vector<std::size_t> index_by_number_;
};

/// Reads and validates a corpus file (JSON layout: {"goals":[...]}, UTF-8,
/// unknown keys ignored). Throws MalformedCorpus when the file cannot be
/// parsed and InvalidCorpus when the content violates the corpus invariants.
SdgCorpus load_corpus(const std::filesystem::path& path);

/// Builds the embedding document for one goal: name, description, then each
/// target's text followed by its indicator texts, non-empty segments joined
/// by single newlines. Deterministic for identical corpora.
std::string goal_document(const SdgCorpus& corpus, int goal_number);

}  // namespace sdgmap
