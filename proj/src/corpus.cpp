#include "sdgmap/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace sdgmap {

namespace {

// Splits a dotted code like "7.b.1" into its segments.
std::vector<std::string> code_segments(const std::string& code) {
  std::vector<std::string> segments;
  std::string current;
  for (char c : code) {
    if (c == '.') {
      segments.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  segments.push_back(current);
  return segments;
}

bool any_segment_empty(const std::vector<std::string>& segments) {
  for (const auto& s : segments) {
    if (s.empty()) return true;
  }
  return false;
}

}  // namespace

SdgCorpus::SdgCorpus(std::vector<Goal> goals) : goals_(std::move(goals)) {
  if (goals_.size() != static_cast<std::size_t>(kGoalCount)) {
    throw InvalidCorpus("expected " + std::to_string(kGoalCount) +
                        " goals, found " + std::to_string(goals_.size()));
  }

  index_by_number_.assign(kGoalCount + 1, goals_.size());
  std::unordered_set<std::string> seen_codes;

  for (std::size_t i = 0; i < goals_.size(); ++i) {
    const Goal& goal = goals_[i];
    if (goal.number < 1 || goal.number > kGoalCount) {
      throw InvalidCorpus("goal number " + std::to_string(goal.number) +
                          " outside 1.." + std::to_string(kGoalCount));
    }
    if (index_by_number_[goal.number] != goals_.size()) {
      throw InvalidCorpus("duplicate goal number " +
                          std::to_string(goal.number));
    }
    index_by_number_[goal.number] = i;
    if (goal.name.empty()) {
      throw InvalidCorpus("goal " + std::to_string(goal.number) +
                          " has an empty name");
    }

    const std::string goal_prefix = std::to_string(goal.number);
    for (const Target& target : goal.targets) {
      auto target_segments = code_segments(target.code);
      if (target_segments.size() != 2 || any_segment_empty(target_segments) ||
          target_segments[0] != goal_prefix) {
        throw InvalidCorpus("target code \"" + target.code +
                            "\" invalid under goal " + goal_prefix);
      }
      if (!seen_codes.insert(target.code).second) {
        throw InvalidCorpus("duplicate target code \"" + target.code + "\"");
      }
      for (const Indicator& indicator : target.indicators) {
        auto ind_segments = code_segments(indicator.code);
        if (ind_segments.size() != 3 || any_segment_empty(ind_segments) ||
            ind_segments[0] != target_segments[0] ||
            ind_segments[1] != target_segments[1]) {
          throw InvalidCorpus("indicator code \"" + indicator.code +
                              "\" invalid under target " + target.code);
        }
        if (!seen_codes.insert(indicator.code).second) {
          throw InvalidCorpus("duplicate indicator code \"" + indicator.code +
                              "\"");
        }
      }
    }
  }
}

const Goal& SdgCorpus::goal(int number) const {
  if (number < 1 || number > kGoalCount) {
    throw UnknownGoal("goal number " + std::to_string(number) +
                      " outside 1.." + std::to_string(kGoalCount));
  }
  return goals_[index_by_number_[number]];
}

SdgCorpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw MalformedCorpus("cannot open corpus file: " + path.string());
  }

  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedCorpus("corpus parse failure: " + std::string(e.what()));
  }

  std::vector<Goal> goals;
  try {
    for (const auto& goal_json : doc.at("goals")) {
      Goal goal;
      goal.number = goal_json.at("number").get<int>();
      goal.name = goal_json.at("name").get<std::string>();
      goal.description = goal_json.value("description", std::string{});
      if (goal_json.contains("targets")) {
        for (const auto& target_json : goal_json.at("targets")) {
          Target target;
          target.code = target_json.at("code").get<std::string>();
          target.text = target_json.value("text", std::string{});
          if (target_json.contains("indicators")) {
            for (const auto& ind_json : target_json.at("indicators")) {
              Indicator indicator;
              indicator.code = ind_json.at("code").get<std::string>();
              indicator.text = ind_json.value("text", std::string{});
              target.indicators.push_back(std::move(indicator));
            }
          }
          goal.targets.push_back(std::move(target));
        }
      }
      goals.push_back(std::move(goal));
    }
  } catch (const nlohmann::json::exception& e) {
    throw MalformedCorpus("corpus layout error: " + std::string(e.what()));
  }

  return SdgCorpus(std::move(goals));
}

std::string goal_document(const SdgCorpus& corpus, int goal_number) {
  const Goal& goal = corpus.goal(goal_number);

  std::string doc;
  auto append = [&doc](const std::string& segment) {
    if (segment.empty()) return;
    if (!doc.empty()) doc.push_back('\n');
    doc += segment;
  };

  append(goal.name);
  append(goal.description);
  for (const Target& target : goal.targets) {
    append(target.text);
    for (const Indicator& indicator : target.indicators) {
      append(indicator.text);
    }
  }
  return doc;
}

}  // namespace sdgmap
