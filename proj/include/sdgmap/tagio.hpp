#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sdgmap/evaluate.hpp"
#include "sdgmap/llmtag.hpp"
#include "sdgmap/simtag.hpp"

namespace sdgmap {

// JSONL serialization of the two tagging dialects. Each line is one
// publication; the "method" field distinguishes similarity from llm records.

std::string to_json_line(const TagResult& result);
std::string to_json_line(const LlmTagResult& result);

// A transport-level failure recorded in place of an answer; resume drops and
// retries these.
std::string error_json_line(const std::string& publication_id,
                            const std::string& message);

TagResult sim_tag_from_json(const std::string& line, std::size_t line_no = 0);
LlmTagResult llm_tag_from_json(const std::string& line,
                               std::size_t line_no = 0);

std::vector<TagResult> read_sim_tags(const std::filesystem::path& path);

struct LlmTagFile {
  std::vector<LlmTagResult> results;    // answered lines, input order
  std::vector<std::string> failed_ids;  // ids of error lines
};

LlmTagFile read_llm_tag_file(const std::filesystem::path& path);
std::vector<LlmTagResult> read_llm_tags(const std::filesystem::path& path);

void write_sim_tags(const std::filesystem::path& path,
                    std::span<const TagResult> results);

// Label sets for evaluation. The llm overload keeps only status-ok records,
// mirroring the removal of unanswered and unscored publications upstream.
LabelMatrix label_matrix_from(std::span<const TagResult> results);
LabelMatrix label_matrix_from(std::span<const LlmTagResult> results);

// Reads a tag file of either dialect into a label matrix, detecting the
// dialect per line via the "method" field.
LabelMatrix read_label_matrix(const std::filesystem::path& path);

}  // namespace sdgmap
