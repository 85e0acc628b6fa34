#include "sdgmap/llmtag.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace sdgmap {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

// A numbered list marker: one or two digits, a period, then whitespace or
// end-of-text, where the nearest non-space character before the digits is
// start-of-text, a newline, or sentence/introducer punctuation. LLM answers
// frequently glue items together ("...energy.2. Goal 12..."), so markers
// cannot rely on line breaks.
std::vector<std::size_t> item_starts(const std::string& text) {
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!is_digit(text[i])) continue;
    if (i > 0 && is_digit(text[i - 1])) continue;  // inside a longer number

    std::size_t digits_end = i + 1;
    if (digits_end < text.size() && is_digit(text[digits_end])) ++digits_end;
    if (digits_end >= text.size() || text[digits_end] != '.') continue;
    std::size_t after = digits_end + 1;
    if (after < text.size() && !std::isspace(static_cast<unsigned char>(text[after]))) {
      continue;
    }

    std::size_t j = i;
    while (j > 0 && (text[j - 1] == ' ' || text[j - 1] == '\t')) --j;
    const bool boundary_before =
        j == 0 || text[j - 1] == '\n' ||
        std::string_view(".:;?!").find(text[j - 1]) != std::string_view::npos;
    if (boundary_before) starts.push_back(i);
  }
  return starts;
}

struct ConfidenceMatch {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::optional<int> pct;
  std::optional<ConfidenceLevel> level;
};

struct GoalMatch {
  std::size_t begin = 0;
  std::size_t end = 0;
  int goal = 0;
};

// The four confidence shapes the answers use, most specific first so the
// simpler shapes never re-consume part of a richer one:
//   C  confidence level: High (100%)
//   B  90% confidence level
//   D  Confidence level: Low        (word only, no percentage)
//   A  (30%)                        (bare parenthesized percentage)
const std::regex kFormC(
    R"(confidence\s+level\s*:?\s*(high|medium|low)\s*\(\s*(\d{1,3})\s*%\s*\))",
    std::regex::icase);
const std::regex kFormB(R"((\d{1,3})\s*%\s+confidence\s+level)",
                        std::regex::icase);
const std::regex kFormD(R"(confidence\s+level\s*:?\s*(high|medium|low)\b)",
                        std::regex::icase);
const std::regex kFormA(R"(\(\s*(\d{1,3})\s*%\s*\))", std::regex::icase);

const std::regex kGoalPattern(
    R"(\b(sustainable\s+development\s+goal|goal|sdg)\s*#?\s*(\d{1,2}))",
    std::regex::icase);

std::vector<ConfidenceMatch> find_confidences(const std::string& item) {
  std::vector<ConfidenceMatch> found;
  std::vector<bool> consumed(item.size(), false);

  auto free_span = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (consumed[i]) return false;
    }
    return true;
  };
  auto claim_span = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) consumed[i] = true;
  };
  auto scan = [&](const std::regex& re, auto&& build) {
    for (std::sregex_iterator it(item.begin(), item.end(), re), last; it != last;
         ++it) {
      const std::smatch& m = *it;
      const auto begin = static_cast<std::size_t>(m.position(0));
      const auto end = begin + static_cast<std::size_t>(m.length(0));
      if (!free_span(begin, end)) continue;
      ConfidenceMatch match;
      match.begin = begin;
      match.end = end;
      if (!build(m, match)) continue;
      claim_span(begin, end);
      found.push_back(std::move(match));
    }
  };

  auto valid_pct = [](int pct) { return pct >= 0 && pct <= 100; };
  scan(kFormC, [&](const std::smatch& m, ConfidenceMatch& out) {
    const int pct = std::stoi(m[2].str());
    if (!valid_pct(pct)) return false;
    out.level = parse_confidence_level(m[1].str());
    out.pct = pct;
    return true;
  });
  scan(kFormB, [&](const std::smatch& m, ConfidenceMatch& out) {
    const int pct = std::stoi(m[1].str());
    if (!valid_pct(pct)) return false;
    out.pct = pct;
    return true;
  });
  scan(kFormD, [&](const std::smatch& m, ConfidenceMatch& out) {
    out.level = parse_confidence_level(m[1].str());
    return out.level.has_value();
  });
  scan(kFormA, [&](const std::smatch& m, ConfidenceMatch& out) {
    const int pct = std::stoi(m[1].str());
    if (!valid_pct(pct)) return false;
    out.pct = pct;
    return true;
  });

  std::sort(found.begin(), found.end(),
            [](const ConfidenceMatch& a, const ConfidenceMatch& b) {
              return a.begin < b.begin;
            });
  return found;
}

std::vector<GoalMatch> find_goals(const std::string& item) {
  std::vector<GoalMatch> found;
  for (std::sregex_iterator it(item.begin(), item.end(), kGoalPattern), last;
       it != last; ++it) {
    const std::smatch& m = *it;
    const auto begin = static_cast<std::size_t>(m.position(0));
    const auto end = begin + static_cast<std::size_t>(m.length(0));
    if (end < item.size() && is_digit(item[end])) continue;  // "SDG 123"
    const int goal = std::stoi(m[2].str());
    if (goal < 1 || goal > 17) continue;
    found.push_back({begin, end, goal});
  }
  return found;
}

std::string extract_reason(const std::string& item, std::size_t from) {
  std::size_t begin = from;
  while (begin < item.size()) {
    const char c = item[begin];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '-' ||
        c == ':' || c == ',') {
      ++begin;
    } else {
      break;
    }
  }
  std::size_t end = item.size();
  while (end > begin &&
         std::isspace(static_cast<unsigned char>(item[end - 1]))) {
    --end;
  }
  std::string reason = item.substr(begin, end - begin);
  // A leftover "." or ")" after the confidence is not an explanation.
  const bool has_substance =
      std::any_of(reason.begin(), reason.end(), [](unsigned char c) {
        return std::isalnum(c) != 0;
      });
  return has_substance ? reason : std::string{};
}

void parse_item(const std::string& item,
                std::vector<GoalAssignment>& assignments) {
  const std::vector<GoalMatch> goals = find_goals(item);
  if (goals.empty()) return;
  const std::vector<ConfidenceMatch> confidences = find_confidences(item);

  for (const GoalMatch& goal : goals) {
    const ConfidenceMatch* chosen = nullptr;
    std::size_t best_distance = 0;
    bool best_following = false;
    for (const ConfidenceMatch& conf : confidences) {
      const bool following = conf.begin >= goal.end;
      const std::size_t distance =
          following ? conf.begin - goal.end
                    : goal.begin - std::min(conf.end, goal.begin);
      if (!chosen || distance < best_distance ||
          (distance == best_distance && following && !best_following)) {
        chosen = &conf;
        best_distance = distance;
        best_following = following;
      }
    }

    GoalAssignment assignment;
    assignment.goal = goal.goal;
    std::size_t reason_from = goal.end;
    if (chosen) {
      assignment.confidence_pct = chosen->pct;
      assignment.level = chosen->level;
      reason_from = std::max(goal.end, chosen->end);
    }
    assignment.reason = extract_reason(item, reason_from);
    assignments.push_back(std::move(assignment));
  }
}

int pct_or_lowest(const GoalAssignment& a) {
  return a.confidence_pct.value_or(-1);
}

}  // namespace

std::string to_string(ConfidenceLevel level) {
  switch (level) {
    case ConfidenceLevel::Low: return "Low";
    case ConfidenceLevel::Medium: return "Medium";
    case ConfidenceLevel::High: return "High";
  }
  return "Low";
}

std::optional<ConfidenceLevel> parse_confidence_level(const std::string& word) {
  const std::string w = lower(word);
  if (w == "high") return ConfidenceLevel::High;
  if (w == "medium") return ConfidenceLevel::Medium;
  if (w == "low") return ConfidenceLevel::Low;
  return std::nullopt;
}

std::string to_string(LlmStatus status) {
  switch (status) {
    case LlmStatus::Ok: return "ok";
    case LlmStatus::NoAnswer: return "no_answer";
    case LlmStatus::Unscored: return "unscored";
  }
  return "no_answer";
}

LlmStatus parse_llm_status(const std::string& word) {
  if (word == "ok") return LlmStatus::Ok;
  if (word == "no_answer") return LlmStatus::NoAnswer;
  if (word == "unscored") return LlmStatus::Unscored;
  throw Error("unknown LLM tag status \"" + word + "\"");
}

std::string build_prompt(const Publication& pub) {
  return "Analyze the publication and determine the SDGs that it aligned "
         "with, provide the confidence levels(%) for each assigned goal and "
         "the reason for assignment. Results listed the goals in descending "
         "order of confidence level, with the highest confidence goal listed "
         "first. Title: " +
         pub.title + ". Abstract: " + pub.abstract + ".";
}

std::vector<GoalAssignment> parse_llm_output(const std::string& text) {
  std::vector<std::size_t> starts = item_starts(text);

  std::vector<std::string> items;
  std::size_t cursor = 0;
  for (std::size_t start : starts) {
    if (start > cursor) items.push_back(text.substr(cursor, start - cursor));
    cursor = start;
  }
  items.push_back(text.substr(cursor));

  std::vector<GoalAssignment> assignments;
  for (const std::string& item : items) {
    parse_item(item, assignments);
  }

  // Collapse repeated goals onto the strongest mention, keeping the position
  // of the first.
  std::vector<GoalAssignment> unique;
  for (GoalAssignment& assignment : assignments) {
    auto it = std::find_if(unique.begin(), unique.end(),
                           [&](const GoalAssignment& existing) {
                             return existing.goal == assignment.goal;
                           });
    if (it == unique.end()) {
      unique.push_back(std::move(assignment));
    } else if (pct_or_lowest(assignment) > pct_or_lowest(*it)) {
      *it = std::move(assignment);
    }
  }
  return unique;
}

ConfidenceLevel classify_confidence(int pct) {
  if (pct < 0 || pct > 100) {
    throw OutOfRange("confidence percentage " + std::to_string(pct) +
                     " outside [0, 100]");
  }
  if (pct < 60) return ConfidenceLevel::Low;
  if (pct < 80) return ConfidenceLevel::Medium;
  return ConfidenceLevel::High;
}

std::vector<GoalAssignment> filter_assignments(
    std::vector<GoalAssignment> assignments, int min_pct) {
  std::erase_if(assignments, [&](const GoalAssignment& a) {
    return !a.confidence_pct || *a.confidence_pct < min_pct;
  });
  return assignments;
}

LlmTagResult build_tag_result(std::string publication_id,
                              std::string raw_response, int min_pct) {
  LlmTagResult result;
  result.publication_id = std::move(publication_id);
  result.raw_response = std::move(raw_response);

  std::vector<GoalAssignment> parsed = parse_llm_output(result.raw_response);
  if (parsed.empty()) {
    result.status = LlmStatus::NoAnswer;
    return result;
  }
  const bool any_scored =
      std::any_of(parsed.begin(), parsed.end(), [](const GoalAssignment& a) {
        return a.confidence_pct.has_value();
      });
  if (!any_scored) {
    result.status = LlmStatus::Unscored;
    return result;
  }

  result.status = LlmStatus::Ok;
  result.assignments = filter_assignments(std::move(parsed), min_pct);
  std::stable_sort(result.assignments.begin(), result.assignments.end(),
                   [](const GoalAssignment& a, const GoalAssignment& b) {
                     if (*a.confidence_pct != *b.confidence_pct) {
                       return *a.confidence_pct > *b.confidence_pct;
                     }
                     return a.goal < b.goal;
                   });
  return result;
}

}  // namespace sdgmap
