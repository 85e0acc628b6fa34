#include "sdgmap/tagio.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sdgmap {

namespace {

nlohmann::json parse_line(const std::string& line, std::size_t line_no) {
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedRecord(line_no, "tag line is not JSON: " +
                                       std::string(e.what()));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open tag file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

template <typename Line>
void for_each_line(const std::string& content, Line&& handle) {
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    handle(line, line_no);
  }
}

}  // namespace

std::string to_json_line(const TagResult& result) {
  nlohmann::ordered_json obj;
  obj["id"] = result.publication_id;
  obj["method"] = "similarity";
  obj["threshold"] = result.threshold;
  nlohmann::ordered_json tags = nlohmann::ordered_json::array();
  for (const TaggedGoal& tag : result.tags) {
    tags.push_back({{"goal", tag.goal}, {"score", tag.score}});
  }
  obj["tags"] = std::move(tags);
  return obj.dump();
}

std::string to_json_line(const LlmTagResult& result) {
  nlohmann::ordered_json obj;
  obj["id"] = result.publication_id;
  obj["method"] = "llm";
  obj["status"] = to_string(result.status);
  nlohmann::ordered_json assignments = nlohmann::ordered_json::array();
  for (const GoalAssignment& assignment : result.assignments) {
    nlohmann::ordered_json entry;
    entry["goal"] = assignment.goal;
    if (assignment.confidence_pct) entry["confidence"] = *assignment.confidence_pct;
    if (assignment.level) entry["level"] = to_string(*assignment.level);
    if (!assignment.reason.empty()) entry["reason"] = assignment.reason;
    assignments.push_back(std::move(entry));
  }
  obj["assignments"] = std::move(assignments);
  obj["raw"] = result.raw_response;
  return obj.dump();
}

std::string error_json_line(const std::string& publication_id,
                            const std::string& message) {
  nlohmann::ordered_json obj;
  obj["id"] = publication_id;
  obj["method"] = "llm";
  obj["status"] = "error";
  obj["error"] = message;
  return obj.dump();
}

TagResult sim_tag_from_json(const std::string& line, std::size_t line_no) {
  const nlohmann::json obj = parse_line(line, line_no);
  TagResult result;
  try {
    result.publication_id = obj.at("id").get<std::string>();
    result.threshold = obj.value("threshold", 0.0);
    for (const auto& tag : obj.at("tags")) {
      result.tags.push_back(
          {tag.at("goal").get<int>(), tag.at("score").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw MalformedRecord(line_no,
                          "bad similarity tag line: " + std::string(e.what()));
  }
  return result;
}

LlmTagResult llm_tag_from_json(const std::string& line, std::size_t line_no) {
  const nlohmann::json obj = parse_line(line, line_no);
  LlmTagResult result;
  try {
    result.publication_id = obj.at("id").get<std::string>();
    result.status = parse_llm_status(obj.at("status").get<std::string>());
    result.raw_response = obj.value("raw", std::string{});
    for (const auto& entry : obj.value("assignments", nlohmann::json::array())) {
      GoalAssignment assignment;
      assignment.goal = entry.at("goal").get<int>();
      if (entry.contains("confidence")) {
        assignment.confidence_pct = entry.at("confidence").get<int>();
      }
      if (entry.contains("level")) {
        assignment.level = parse_confidence_level(entry.at("level").get<std::string>());
      }
      assignment.reason = entry.value("reason", std::string{});
      result.assignments.push_back(std::move(assignment));
    }
  } catch (const nlohmann::json::exception& e) {
    throw MalformedRecord(line_no, "bad llm tag line: " + std::string(e.what()));
  }
  return result;
}

std::vector<TagResult> read_sim_tags(const std::filesystem::path& path) {
  std::vector<TagResult> results;
  for_each_line(read_file(path), [&](const std::string& line, std::size_t n) {
    results.push_back(sim_tag_from_json(line, n));
  });
  return results;
}

LlmTagFile read_llm_tag_file(const std::filesystem::path& path) {
  LlmTagFile file;
  for_each_line(read_file(path), [&](const std::string& line, std::size_t n) {
    const nlohmann::json obj = parse_line(line, n);
    if (obj.value("status", std::string{}) == "error") {
      try {
        file.failed_ids.push_back(obj.at("id").get<std::string>());
      } catch (const nlohmann::json::exception& e) {
        throw MalformedRecord(n, "bad error line: " + std::string(e.what()));
      }
      return;
    }
    file.results.push_back(llm_tag_from_json(line, n));
  });
  return file;
}

std::vector<LlmTagResult> read_llm_tags(const std::filesystem::path& path) {
  return read_llm_tag_file(path).results;
}

void write_sim_tags(const std::filesystem::path& path,
                    std::span<const TagResult> results) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open tag file for writing: " + path.string());
  }
  for (const TagResult& result : results) {
    out << to_json_line(result) << '\n';
  }
}

LabelMatrix label_matrix_from(std::span<const TagResult> results) {
  LabelMatrix matrix;
  for (const TagResult& result : results) {
    matrix.publication_ids.push_back(result.publication_id);
    std::set<int> goals;
    for (const TaggedGoal& tag : result.tags) goals.insert(tag.goal);
    matrix.labels.push_back(std::move(goals));
  }
  matrix.validate();
  return matrix;
}

LabelMatrix label_matrix_from(std::span<const LlmTagResult> results) {
  LabelMatrix matrix;
  for (const LlmTagResult& result : results) {
    if (result.status != LlmStatus::Ok) continue;
    matrix.publication_ids.push_back(result.publication_id);
    std::set<int> goals;
    for (const GoalAssignment& assignment : result.assignments) {
      goals.insert(assignment.goal);
    }
    matrix.labels.push_back(std::move(goals));
  }
  matrix.validate();
  return matrix;
}

LabelMatrix read_label_matrix(const std::filesystem::path& path) {
  LabelMatrix matrix;
  for_each_line(read_file(path), [&](const std::string& line, std::size_t n) {
    const nlohmann::json obj = parse_line(line, n);
    const std::string method = obj.value("method", std::string{});
    if (method == "similarity") {
      const TagResult result = sim_tag_from_json(line, n);
      matrix.publication_ids.push_back(result.publication_id);
      std::set<int> goals;
      for (const TaggedGoal& tag : result.tags) goals.insert(tag.goal);
      matrix.labels.push_back(std::move(goals));
    } else if (method == "llm") {
      if (obj.value("status", std::string{}) == "error") return;
      const LlmTagResult result = llm_tag_from_json(line, n);
      if (result.status != LlmStatus::Ok) return;
      matrix.publication_ids.push_back(result.publication_id);
      std::set<int> goals;
      for (const GoalAssignment& assignment : result.assignments) {
        goals.insert(assignment.goal);
      }
      matrix.labels.push_back(std::move(goals));
    } else {
      throw MalformedRecord(n, "tag line has unknown method \"" + method + "\"");
    }
  });
  matrix.validate();
  return matrix;
}

}  // namespace sdgmap
