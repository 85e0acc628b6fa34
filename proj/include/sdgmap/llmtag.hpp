#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "sdgmap/errors.hpp"
#include "sdgmap/ingest.hpp"

namespace sdgmap {

enum class ConfidenceLevel { Low, Medium, High };

std::string to_string(ConfidenceLevel level);
std::optional<ConfidenceLevel> parse_confidence_level(const std::string& word);

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model = "gpt-3.5-turbo";
  std::vector<ChatMessage> messages;
  int max_tokens = 600;
};

struct RetryPolicy {
  std::chrono::milliseconds sleep{60'000};
  int max_attempts = 10;
};

// One goal extracted from a free-text answer. confidence_pct and level are
// independent: the model sometimes states only a percentage, only a word, or
// both.
struct GoalAssignment {
  int goal = 0;
  std::optional<int> confidence_pct;
  std::optional<ConfidenceLevel> level;
  std::string reason;

  bool operator==(const GoalAssignment&) const = default;
};

enum class LlmStatus { Ok, NoAnswer, Unscored };

std::string to_string(LlmStatus status);
LlmStatus parse_llm_status(const std::string& word);

struct LlmTagResult {
  std::string publication_id;
  // Post-filter assignments, confidence descending, ties by ascending goal.
  std::vector<GoalAssignment> assignments;
  std::string raw_response;
  LlmStatus status = LlmStatus::NoAnswer;
};

// The exact instruction sent per publication.
std::string build_prompt(const Publication& pub);

struct ChatClientConfig {
  std::string endpoint;  // base URL; "/chat/completions" is appended
  std::string api_key;   // sent as a bearer token when non-empty
  int timeout_seconds = 120;
};

// POSTs the request, retrying transport failures and HTTP 5xx/429 with a
// fixed sleep between attempts. 401/403 raise AuthError immediately; other
// client errors and malformed success bodies raise ProtocolError immediately;
// running out of attempts raises RetriesExhausted carrying the last error.
std::string complete_with_retry(const ChatClientConfig& client,
                                const ChatRequest& request,
                                const RetryPolicy& policy);

// Extracts goal assignments from a free-form answer. Recognizes "Goal N",
// "SDG N" and "Sustainable Development Goal N" mentions (1..17), pairs each
// with the nearest confidence expression in the same list item, and keeps the
// highest-confidence mention of a repeated goal. Unparseable text yields an
// empty collection.
std::vector<GoalAssignment> parse_llm_output(const std::string& text);

// Buckets a percentage: < 60 Low, 60..79 Medium, >= 80 High.
// Throws OutOfRange outside [0, 100].
ConfidenceLevel classify_confidence(int pct);

// Drops assignments lacking a numeric confidence and those below min_pct;
// preserves order.
std::vector<GoalAssignment> filter_assignments(
    std::vector<GoalAssignment> assignments, int min_pct);

// Full per-publication pipeline over a raw answer: parse, set status
// (no_answer when nothing matched, unscored when no mention carried a
// percentage), filter at min_pct, and sort for output.
LlmTagResult build_tag_result(std::string publication_id,
                              std::string raw_response, int min_pct);

}  // namespace sdgmap
