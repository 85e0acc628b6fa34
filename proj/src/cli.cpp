#include "sdgmap/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "sdgmap/corpus.hpp"
#include "sdgmap/embed.hpp"
#include "sdgmap/evaluate.hpp"
#include "sdgmap/hybrid.hpp"
#include "sdgmap/ingest.hpp"
#include "sdgmap/llmtag.hpp"
#include "sdgmap/simtag.hpp"
#include "sdgmap/tagio.hpp"

namespace sdgmap {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

long parse_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    long parsed = std::stol(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config key \"" + key + "\" needs an integer, got \"" +
                      value + "\"");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    double parsed = std::stod(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config key \"" + key + "\" needs a number, got \"" +
                      value + "\"");
  }
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config key \"" + key + "\" needs true/false, got \"" +
                    value + "\"");
}

PubFormat detect_format(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return PubFormat::Csv;
  if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json") {
    return PubFormat::Jsonl;
  }
  throw ConfigError("cannot infer publication format from \"" + path.string() +
                    "\"; use a .csv or .jsonl extension");
}

std::unique_ptr<EmbeddingProvider> make_provider(const RunConfig& config) {
  if (config.provider == "hash") {
    return std::make_unique<HashingProvider>(config.embed_dim);
  }
  RemoteEmbedConfig remote;
  remote.endpoint = config.embed_endpoint;
  remote.dim = config.embed_dim;
  remote.batch_size = config.embed_batch;
  remote.max_in_flight = config.embed_in_flight;
  return std::make_unique<RemoteProvider>(std::move(remote));
}

nlohmann::ordered_json config_echo(const RunConfig& config) {
  // Everything except the API key, which must never reach a report file.
  nlohmann::ordered_json echo;
  echo["corpus"] = config.corpus_path.string();
  echo["publications"] = config.publications_path.string();
  echo["output_dir"] = config.output_dir.string();
  echo["provider"] = config.provider;
  echo["embed_endpoint"] = config.embed_endpoint;
  echo["embed_dim"] = config.embed_dim;
  echo["similarity_threshold"] = config.similarity_threshold;
  echo["threshold_inclusive"] = config.threshold_inclusive;
  echo["histogram_bin_width"] = config.histogram_bin_width;
  echo["confidence_min"] = config.confidence_min;
  echo["llm_endpoint"] = config.llm_endpoint;
  echo["llm_model"] = config.llm_model;
  echo["llm_max_tokens"] = config.llm_max_tokens;
  echo["retry_sleep_seconds"] = config.retry_sleep_seconds;
  echo["retry_max_attempts"] = config.retry_max_attempts;
  echo["parallelism"] = config.parallelism;
  return echo;
}

class StageTimer {
 public:
  StageTimer(const RunConfig& config, std::string stage)
      : config_(config),
        stage_(std::move(stage)),
        start_(std::chrono::steady_clock::now()) {}

  void finish(std::size_t inputs, std::size_t outputs,
              nlohmann::ordered_json discarded) {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    nlohmann::ordered_json record;
    record["stage"] = stage_;
    record["inputs"] = inputs;
    record["outputs"] = outputs;
    record["discarded"] = std::move(discarded);
    record["duration_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    record["config"] = config_echo(config_);

    std::ofstream out(config_.output_dir / "run_report.jsonl",
                      std::ios::binary | std::ios::app);
    if (!out) {
      throw Error("cannot append to run report in " +
                  config_.output_dir.string());
    }
    out << record.dump() << '\n';
  }

 private:
  const RunConfig& config_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

std::string format_real(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open output file: " + path.string());
  }
  out << content;
}

}  // namespace

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path.string());
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#' ||
        stripped.front() == '[') {
      continue;  // blank, comment, or section header
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        " is not key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = unquote(trim(stripped.substr(eq + 1)));

    if (key == "corpus") config.corpus_path = value;
    else if (key == "publications") config.publications_path = value;
    else if (key == "output_dir") config.output_dir = value;
    else if (key == "provider") config.provider = value;
    else if (key == "embed_endpoint") config.embed_endpoint = value;
    else if (key == "embed_dim") config.embed_dim = static_cast<std::size_t>(parse_integer(key, value));
    else if (key == "embed_batch") config.embed_batch = static_cast<std::size_t>(parse_integer(key, value));
    else if (key == "embed_in_flight") config.embed_in_flight = static_cast<std::size_t>(parse_integer(key, value));
    else if (key == "similarity_threshold") config.similarity_threshold = parse_real(key, value);
    else if (key == "threshold_inclusive") config.threshold_inclusive = parse_flag(key, value);
    else if (key == "histogram_bin_width") config.histogram_bin_width = parse_real(key, value);
    else if (key == "confidence_min") config.confidence_min = static_cast<int>(parse_integer(key, value));
    else if (key == "llm_endpoint") config.llm_endpoint = value;
    else if (key == "llm_key") config.llm_key = value;
    else if (key == "llm_model") config.llm_model = value;
    else if (key == "llm_max_tokens") config.llm_max_tokens = static_cast<int>(parse_integer(key, value));
    else if (key == "retry_sleep_seconds") config.retry_sleep_seconds = parse_real(key, value);
    else if (key == "retry_max_attempts") config.retry_max_attempts = static_cast<int>(parse_integer(key, value));
    else if (key == "parallelism") config.parallelism = static_cast<int>(parse_integer(key, value));
    else if (key == "total_publications") config.total_publications = static_cast<std::size_t>(parse_integer(key, value));
    else if (key == "skip_empty_predictions") config.skip_empty_predictions = parse_flag(key, value);
    else throw ConfigError("unknown config key \"" + key + "\" on line " + std::to_string(line_no));
  }
}

void apply_environment(RunConfig& config) {
  if (const char* endpoint = std::getenv("SDGMAP_LLM_ENDPOINT")) {
    config.llm_endpoint = endpoint;
  }
  if (const char* key = std::getenv("SDGMAP_LLM_KEY")) {
    config.llm_key = key;
  }
}

void validate_config(const RunConfig& config) {
  if (config.provider != "hash" && config.provider != "remote") {
    throw ConfigError("provider must be hash or remote, got \"" +
                      config.provider + "\"");
  }
  if (config.provider == "remote" && config.embed_endpoint.empty()) {
    throw ConfigError("remote provider needs embed_endpoint");
  }
  if (config.embed_dim < 2) {
    throw ConfigError("embed_dim must be at least 2");
  }
  if (config.similarity_threshold < 0.0 || config.similarity_threshold > 1.0) {
    throw ConfigError("similarity_threshold must lie in [0, 1]");
  }
  if (!(config.histogram_bin_width > 0.0) ||
      config.histogram_bin_width > 1.0) {
    throw ConfigError("histogram_bin_width must lie in (0, 1]");
  }
  if (config.confidence_min < 0 || config.confidence_min > 100) {
    throw ConfigError("confidence_min must lie in [0, 100]");
  }
  if (config.llm_max_tokens < 1) {
    throw ConfigError("llm_max_tokens must be at least 1");
  }
  if (config.retry_max_attempts < 1) {
    throw ConfigError("retry_max_attempts must be at least 1");
  }
  if (config.retry_sleep_seconds < 0.0) {
    throw ConfigError("retry_sleep_seconds cannot be negative");
  }
  if (config.parallelism < 1) {
    throw ConfigError("parallelism must be at least 1");
  }
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error)) return 1;
  if (dynamic_cast<const TransportError*>(&error) ||
      dynamic_cast<const ProtocolError*>(&error) ||
      dynamic_cast<const AuthError*>(&error) ||
      dynamic_cast<const RetriesExhausted*>(&error)) {
    return 3;
  }
  return 2;
}

void cmd_vectorize(const RunConfig& config) {
  StageTimer timer(config, "vectorize");
  const SdgCorpus corpus = load_corpus(config.corpus_path);
  std::unique_ptr<EmbeddingProvider> provider = make_provider(config);
  const GoalVectorCache cache = compute_goal_vectors(corpus, *provider);
  save_goal_vectors(config.output_dir / "goal_vectors.json", cache);
  timer.finish(cache.vectors.size(), cache.vectors.size(),
               nlohmann::ordered_json::object());
  std::cout << "vectorize: wrote " << cache.vectors.size()
            << " goal vectors (dim " << cache.dim << ", provider "
            << cache.provider_identity << ")\n";
}

void cmd_tag_sim(const RunConfig& config) {
  StageTimer timer(config, "tag-sim");
  const GoalVectorCache cache =
      load_goal_vectors(config.output_dir / "goal_vectors.json");
  std::unique_ptr<EmbeddingProvider> provider = make_provider(config);
  if (cache.provider_identity != provider->identity()) {
    throw ConfigError("goal vectors were computed by \"" +
                      cache.provider_identity + "\" but this run uses \"" +
                      provider->identity() + "\"; rerun vectorize");
  }

  std::vector<Publication> pubs = read_publications(
      config.publications_path, detect_format(config.publications_path));

  // Score in parallel, then merge in publication-id order so the output is
  // reproducible regardless of thread scheduling.
  std::vector<SdgScoreVector> scored(pubs.size());
  std::vector<std::exception_ptr> errors(pubs.size());
  {
    const std::size_t workers = std::min<std::size_t>(
        static_cast<std::size_t>(config.parallelism), std::max<std::size_t>(pubs.size(), 1));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < pubs.size();
             i = next.fetch_add(1)) {
          try {
            scored[i] = score_publication(*provider, cache, pubs[i]);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  std::vector<TagResult> results;
  results.reserve(pubs.size());
  std::vector<double> all_scores;
  all_scores.reserve(pubs.size() * SdgCorpus::kGoalCount);
  for (const SdgScoreVector& scores : scored) {
    results.push_back(apply_threshold(scores, config.similarity_threshold,
                                      config.threshold_inclusive));
    for (const auto& [goal, score] : scores.scores) all_scores.push_back(score);
  }
  std::sort(results.begin(), results.end(),
            [](const TagResult& a, const TagResult& b) {
              return a.publication_id < b.publication_id;
            });

  write_sim_tags(config.output_dir / "sim_tags.jsonl", results);

  std::sort(all_scores.begin(), all_scores.end());
  std::string histogram_csv = "bin,count\n";
  for (const HistogramBin& bin :
       score_histogram(all_scores, config.histogram_bin_width)) {
    histogram_csv += format_real(bin.lower) + "," + std::to_string(bin.count) + "\n";
  }
  write_text_file(config.output_dir / "score_histogram.csv", histogram_csv);

  std::string distribution_csv = "goal,type,count\n";
  for (const auto& [goal, by_type] : goal_distribution(results, pubs)) {
    for (const auto& [type, count] : by_type) {
      distribution_csv +=
          std::to_string(goal) + "," + type + "," + std::to_string(count) + "\n";
    }
  }
  write_text_file(config.output_dir / "goal_distribution.csv", distribution_csv);

  const std::size_t tagged =
      static_cast<std::size_t>(std::count_if(results.begin(), results.end(),
                                             [](const TagResult& r) {
                                               return !r.tags.empty();
                                             }));
  nlohmann::ordered_json discarded;
  discarded["below_threshold"] = pubs.size() - tagged;
  timer.finish(pubs.size(), tagged, std::move(discarded));
  std::cout << "tag-sim: " << tagged << " of " << pubs.size()
            << " publications at or above threshold "
            << format_real(config.similarity_threshold) << "\n";
}

void cmd_tag_llm(const RunConfig& config) {
  StageTimer timer(config, "tag-llm");
  if (config.llm_endpoint.empty()) {
    throw ConfigError("tag-llm needs llm_endpoint (flag, config file, or "
                      "SDGMAP_LLM_ENDPOINT)");
  }
  std::vector<Publication> pubs = read_publications(
      config.publications_path, detect_format(config.publications_path));

  const std::filesystem::path out_path = config.output_dir / "llm_tags.jsonl";

  // Resume: keep every answered line, drop recorded failures, requery the
  // rest. The rewrite runs before any network call so a crash never leaves
  // duplicate ids behind.
  std::vector<LlmTagResult> answered;
  if (std::filesystem::exists(out_path)) {
    answered = read_llm_tag_file(out_path).results;
  }
  std::unordered_set<std::string> answered_ids;
  for (const LlmTagResult& result : answered) {
    answered_ids.insert(result.publication_id);
  }
  {
    std::ofstream rewrite(out_path, std::ios::binary | std::ios::trunc);
    if (!rewrite) {
      throw Error("cannot open llm tag file for writing: " + out_path.string());
    }
    for (const LlmTagResult& result : answered) {
      rewrite << to_json_line(result) << '\n';
    }
  }

  ChatClientConfig client;
  client.endpoint = config.llm_endpoint;
  client.api_key = config.llm_key;
  RetryPolicy policy;
  policy.sleep = std::chrono::milliseconds(
      static_cast<long long>(config.retry_sleep_seconds * 1000.0));
  policy.max_attempts = config.retry_max_attempts;

  std::ofstream out(out_path, std::ios::binary | std::ios::app);
  if (!out) {
    throw Error("cannot open llm tag file for appending: " + out_path.string());
  }

  std::size_t requested = 0;
  std::size_t failed = 0;
  std::map<std::string, std::size_t> status_counts;
  for (const LlmTagResult& result : answered) {
    ++status_counts[to_string(result.status)];
  }

  for (const Publication& pub : pubs) {
    if (answered_ids.contains(pub.id)) continue;
    ChatRequest request;
    request.model = config.llm_model;
    request.max_tokens = config.llm_max_tokens;
    request.messages.push_back({"user", build_prompt(pub)});
    ++requested;
    try {
      const std::string content = complete_with_retry(client, request, policy);
      const LlmTagResult result =
          build_tag_result(pub.id, content, config.confidence_min);
      ++status_counts[to_string(result.status)];
      out << to_json_line(result) << '\n' << std::flush;
    } catch (const RetriesExhausted& error) {
      ++failed;
      out << error_json_line(pub.id, error.what()) << '\n' << std::flush;
    }
  }

  const std::size_t ok = status_counts["ok"];
  nlohmann::ordered_json discarded;
  discarded["no_answer"] = status_counts["no_answer"];
  discarded["unscored"] = status_counts["unscored"];
  discarded["error"] = failed;
  timer.finish(pubs.size(), ok, std::move(discarded));
  std::cout << "tag-llm: " << requested << " publications queried, " << ok
            << " answered with scored goals, " << failed
            << " recorded as failures\n";
}

void cmd_hybrid(const RunConfig& config, const std::filesystem::path& sim_file,
                const std::filesystem::path& llm_file) {
  StageTimer timer(config, "hybrid");
  const std::vector<TagResult> sim = read_sim_tags(sim_file);
  const std::vector<LlmTagResult> llm = read_llm_tags(llm_file);

  const ConnectionSet a = to_connections(std::span<const TagResult>(sim));
  const ConnectionSet b = to_connections(std::span<const LlmTagResult>(llm));

  std::unordered_set<std::string> distinct_ids;
  for (const Connection& connection : a) distinct_ids.insert(connection.publication_id);
  for (const Connection& connection : b) distinct_ids.insert(connection.publication_id);

  const std::size_t denominator = config.total_publications > 0
                                      ? config.total_publications
                                      : distinct_ids.size();
  const ConsensusStats stats = consensus_stats(a, b, denominator);
  if (stats.size_intersection == 0) {
    throw EmptyOverlap("similarity and llm tags share no connection; nothing "
                       "to intersect");
  }

  const ConnectionSet common = intersect(a, b);
  std::map<int, std::size_t> per_goal;
  for (const Connection& connection : common) ++per_goal[connection.goal];

  nlohmann::ordered_json consensus;
  consensus["size_a"] = stats.size_a;
  consensus["size_b"] = stats.size_b;
  consensus["size_intersection"] = stats.size_intersection;
  consensus["size_union"] = stats.size_union;
  consensus["share_of_union"] = stats.share_of_union;
  consensus["consensus_publications"] = stats.consensus_publications;
  consensus["total_publications"] = denominator;
  consensus["consensus_publication_share"] = stats.consensus_publication_share;
  consensus["distinct_publications"] = distinct_ids.size();
  nlohmann::ordered_json per_goal_json = nlohmann::ordered_json::array();
  for (const auto& [goal, count] : per_goal) {
    per_goal_json.push_back({{"goal", goal}, {"count", count}});
  }
  consensus["per_goal"] = std::move(per_goal_json);
  write_text_file(config.output_dir / "consensus.json",
                  consensus.dump(2) + "\n");

  const CooccurrenceGraph graph = cooccurrence_graph(common);
  nlohmann::ordered_json graph_json;
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const auto& [goal, count] : graph.nodes) {
    nodes.push_back({{"goal", goal}, {"count", count}});
  }
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const auto& [pair, count] : graph.edges) {
    edges.push_back({{"a", pair.a}, {"b", pair.b}, {"count", count}});
  }
  graph_json["nodes"] = std::move(nodes);
  graph_json["edges"] = std::move(edges);
  write_text_file(config.output_dir / "cooccurrence.json",
                  graph_json.dump(2) + "\n");

  nlohmann::ordered_json discarded;
  discarded["disagreement"] = stats.size_union - stats.size_intersection;
  timer.finish(stats.size_union, stats.size_intersection, std::move(discarded));
  std::cout << "hybrid: " << stats.size_intersection << " of "
            << stats.size_union << " connections agree ("
            << format_real(stats.share_of_union * 100.0) << "% of the union); "
            << stats.consensus_publications << " of " << denominator
            << " publications reach consensus\n";
}

void cmd_evaluate(const RunConfig& config,
                  const std::filesystem::path& predicted_file,
                  const std::filesystem::path& reference_file) {
  StageTimer timer(config, "evaluate");
  const LabelMatrix predicted = read_label_matrix(predicted_file);
  const LabelMatrix actual = read_label_matrix(reference_file);

  const AlignResult aligned = align(predicted, actual);
  ReportOptions options;
  options.skip_empty_predictions = config.skip_empty_predictions;
  const std::vector<MetricRow> rows =
      classification_report(aligned.predicted, aligned.actual, options);

  write_report_csv(config.output_dir / "report.csv", rows);

  std::cout << "evaluate: " << aligned.predicted.publication_ids.size()
            << " shared publications (" << aligned.dropped_predicted
            << " predicted-only and " << aligned.dropped_actual
            << " reference-only dropped)\n";
  for (const MetricRow& row : rows) {
    if (row.label.ends_with("avg")) {
      std::cout << "  " << row.label << ": precision "
                << format_real(row.precision) << ", recall "
                << format_real(row.recall) << ", f1 " << format_real(row.f1)
                << ", support " << row.support << "\n";
    }
  }

  nlohmann::ordered_json discarded;
  discarded["predicted_only"] = aligned.dropped_predicted;
  discarded["reference_only"] = aligned.dropped_actual;
  const std::size_t total = aligned.predicted.publication_ids.size() +
                            aligned.dropped_predicted + aligned.dropped_actual;
  timer.finish(total, aligned.predicted.publication_ids.size(),
               std::move(discarded));
}

void cmd_report(const RunConfig& config) {
  const std::filesystem::path path = config.output_dir / "run_report.jsonl";
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cout << "run report is empty (no stages recorded in "
              << config.output_dir.string() << ")\n";
    return;
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord(line_no,
                            "bad run report line: " + std::string(e.what()));
    }
    std::cout << record.value("stage", std::string{"?"}) << ": inputs "
              << record.value("inputs", 0) << ", outputs "
              << record.value("outputs", 0) << ", duration "
              << record.value("duration_ms", 0) << " ms";
    if (record.contains("discarded") && !record["discarded"].empty()) {
      std::cout << ", discarded";
      for (const auto& [key, value] : record["discarded"].items()) {
        std::cout << " " << key << "=" << value.get<std::size_t>();
      }
    }
    std::cout << "\n";
  }
}

}  // namespace sdgmap
