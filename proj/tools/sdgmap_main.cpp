#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sdgmap/cli.hpp"

namespace {

// Tracks which settings the command line actually set, so flag values only
// override the config file and environment when the user typed them.
struct FlagValues {
  std::string config_file;
  std::string corpus;
  std::string publications;
  std::string output_dir;
  std::string provider;
  std::string embed_endpoint;
  std::size_t embed_dim = 0;
  std::size_t embed_batch = 0;
  std::size_t embed_in_flight = 0;
  double threshold = 0.0;
  bool exclusive = false;
  double bin_width = 0.0;
  int confidence_min = 0;
  std::string llm_endpoint;
  std::string llm_model;
  int llm_max_tokens = 0;
  double retry_sleep = 0.0;
  int retry_attempts = 0;
  int parallelism = 0;
  std::size_t total_publications = 0;
  bool skip_empty_predictions = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Map research publications to the 17 UN Sustainable "
               "Development Goals by embedding similarity and LLM tagging"};
  app.require_subcommand(1);
  app.fallthrough();

  FlagValues flags;
  app.add_option("--config", flags.config_file,
                 "key = value configuration file");
  auto* opt_corpus = app.add_option("--corpus", flags.corpus, "SDG taxonomy JSON");
  auto* opt_pubs = app.add_option("--publications", flags.publications,
                                  "publication CSV or JSONL");
  auto* opt_out = app.add_option("--output-dir", flags.output_dir,
                                 "directory for result files");
  auto* opt_provider = app.add_option("--provider", flags.provider,
                                      "embedding provider: hash or remote");
  auto* opt_embed_endpoint = app.add_option(
      "--embed-endpoint", flags.embed_endpoint, "remote embedding service URL");
  auto* opt_dim = app.add_option("--dim", flags.embed_dim, "embedding dimension");
  auto* opt_batch =
      app.add_option("--batch", flags.embed_batch, "texts per embedding request");
  auto* opt_in_flight = app.add_option("--in-flight", flags.embed_in_flight,
                                       "max concurrent embedding requests");
  auto* opt_threshold = app.add_option("--threshold", flags.threshold,
                                       "similarity relevance threshold");
  auto* opt_exclusive =
      app.add_flag("--exclusive", flags.exclusive,
                   "keep only scores strictly above the threshold");
  auto* opt_bin_width =
      app.add_option("--bin-width", flags.bin_width, "histogram bin width");
  auto* opt_confidence = app.add_option("--confidence-min", flags.confidence_min,
                                        "minimum LLM confidence percentage");
  auto* opt_llm_endpoint = app.add_option("--llm-endpoint", flags.llm_endpoint,
                                          "chat-completion endpoint base URL");
  auto* opt_model =
      app.add_option("--llm-model", flags.llm_model, "chat model name");
  auto* opt_max_tokens = app.add_option("--max-tokens", flags.llm_max_tokens,
                                        "chat completion token limit");
  auto* opt_sleep = app.add_option("--retry-sleep", flags.retry_sleep,
                                   "seconds between retry attempts");
  auto* opt_attempts = app.add_option("--retry-attempts", flags.retry_attempts,
                                      "maximum request attempts");
  auto* opt_parallelism = app.add_option("--parallelism", flags.parallelism,
                                         "worker threads for scoring");
  auto* opt_total = app.add_option("--total-publications", flags.total_publications,
                                   "denominator for the consensus share");
  auto* opt_skip_empty =
      app.add_flag("--skip-empty-predictions", flags.skip_empty_predictions,
                   "drop empty-prediction samples from the samples average");

  CLI::App* vectorize = app.add_subcommand(
      "vectorize", "embed the 17 goal documents and cache the vectors");
  CLI::App* tag_sim = app.add_subcommand(
      "tag-sim", "score publications against the cached goal vectors");
  CLI::App* tag_llm = app.add_subcommand(
      "tag-llm", "tag publications through the chat-completion endpoint");

  std::string sim_file, llm_file;
  CLI::App* hybrid = app.add_subcommand(
      "hybrid", "intersect similarity and LLM tags into a consensus set");
  hybrid->add_option("--sim", sim_file, "similarity tag JSONL")->required();
  hybrid->add_option("--llm", llm_file, "LLM tag JSONL")->required();

  std::string predicted_file, reference_file;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "score one tag file against another as reference");
  evaluate->add_option("--predicted", predicted_file, "predicted tag JSONL")
      ->required();
  evaluate->add_option("--reference", reference_file, "reference tag JSONL")
      ->required();

  CLI::App* report =
      app.add_subcommand("report", "print the recorded pipeline stages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    sdgmap::RunConfig config;
    if (!flags.config_file.empty()) {
      sdgmap::apply_config_file(config, flags.config_file);
    }
    sdgmap::apply_environment(config);

    if (opt_corpus->count()) config.corpus_path = flags.corpus;
    if (opt_pubs->count()) config.publications_path = flags.publications;
    if (opt_out->count()) config.output_dir = flags.output_dir;
    if (opt_provider->count()) config.provider = flags.provider;
    if (opt_embed_endpoint->count()) config.embed_endpoint = flags.embed_endpoint;
    if (opt_dim->count()) config.embed_dim = flags.embed_dim;
    if (opt_batch->count()) config.embed_batch = flags.embed_batch;
    if (opt_in_flight->count()) config.embed_in_flight = flags.embed_in_flight;
    if (opt_threshold->count()) config.similarity_threshold = flags.threshold;
    if (opt_exclusive->count()) config.threshold_inclusive = false;
    if (opt_bin_width->count()) config.histogram_bin_width = flags.bin_width;
    if (opt_confidence->count()) config.confidence_min = flags.confidence_min;
    if (opt_llm_endpoint->count()) config.llm_endpoint = flags.llm_endpoint;
    if (opt_model->count()) config.llm_model = flags.llm_model;
    if (opt_max_tokens->count()) config.llm_max_tokens = flags.llm_max_tokens;
    if (opt_sleep->count()) config.retry_sleep_seconds = flags.retry_sleep;
    if (opt_attempts->count()) config.retry_max_attempts = flags.retry_attempts;
    if (opt_parallelism->count()) config.parallelism = flags.parallelism;
    if (opt_total->count()) config.total_publications = flags.total_publications;
    if (opt_skip_empty->count()) config.skip_empty_predictions = true;

    sdgmap::validate_config(config);
    std::filesystem::create_directories(config.output_dir);

    if (vectorize->parsed()) {
      sdgmap::cmd_vectorize(config);
    } else if (tag_sim->parsed()) {
      sdgmap::cmd_tag_sim(config);
    } else if (tag_llm->parsed()) {
      sdgmap::cmd_tag_llm(config);
    } else if (hybrid->parsed()) {
      sdgmap::cmd_hybrid(config, sim_file, llm_file);
    } else if (evaluate->parsed()) {
      sdgmap::cmd_evaluate(config, predicted_file, reference_file);
    } else if (report->parsed()) {
      sdgmap::cmd_report(config);
    }
    return 0;
  } catch (const sdgmap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sdgmap::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
