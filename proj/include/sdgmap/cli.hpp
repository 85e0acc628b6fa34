#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "sdgmap/errors.hpp"

namespace sdgmap {

// Effective settings for one command invocation. Populated in precedence
// order: built-in defaults, then the config file, then environment variables,
// then explicit command-line flags. The API key is deliberately unreachable
// from flags.
struct RunConfig {
  std::filesystem::path corpus_path;
  std::filesystem::path publications_path;
  std::filesystem::path output_dir = ".";

  std::string provider = "hash";  // hash | remote
  std::string embed_endpoint;
  std::size_t embed_dim = 768;
  std::size_t embed_batch = 32;
  std::size_t embed_in_flight = 4;

  double similarity_threshold = 0.4;
  bool threshold_inclusive = true;
  double histogram_bin_width = 0.1;

  int confidence_min = 60;
  std::string llm_endpoint;
  std::string llm_key;
  std::string llm_model = "gpt-3.5-turbo";
  int llm_max_tokens = 600;
  double retry_sleep_seconds = 60.0;
  int retry_max_attempts = 10;

  int parallelism = 4;
  std::size_t total_publications = 0;  // 0: derive from the data
  bool skip_empty_predictions = false;
};

// Reads `key = value` lines ('#' comments, blank lines ignored, values may be
// quoted). Unknown keys are rejected so typos never silently fall back to a
// default.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

// SDGMAP_LLM_ENDPOINT / SDGMAP_LLM_KEY.
void apply_environment(RunConfig& config);

void validate_config(const RunConfig& config);

// 1 config error, 2 data error, 3 remote-service failure.
int exit_code_for(const std::exception& error);

void cmd_vectorize(const RunConfig& config);
void cmd_tag_sim(const RunConfig& config);
void cmd_tag_llm(const RunConfig& config);
void cmd_hybrid(const RunConfig& config, const std::filesystem::path& sim_file,
                const std::filesystem::path& llm_file);
void cmd_evaluate(const RunConfig& config,
                  const std::filesystem::path& predicted_file,
                  const std::filesystem::path& reference_file);
void cmd_report(const RunConfig& config);

}  // namespace sdgmap
