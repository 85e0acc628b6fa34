// Acceptance gate for the publication-to-SDG pipeline. Each criterion prints
// one PASS/FAIL line; the exit code is the number of failed criteria.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mock_servers.hpp"
#include "oracles.hpp"
#include "sdgmap/cli.hpp"
#include "sdgmap/embed.hpp"
#include "sdgmap/evaluate.hpp"
#include "sdgmap/hybrid.hpp"
#include "sdgmap/llmtag.hpp"
#include "sdgmap/simtag.hpp"
#include "sdgmap/tagio.hpp"

using namespace sdgmap;

namespace {

// Pinned tolerances and budgets. Loosening any of these is a behavior change.
constexpr double kPropertyTol = 1e-9;        // cosine kernel properties
constexpr double kWorkedExampleTol = 1e-6;   // cosine worked example
constexpr double kOracleTol = 1e-12;         // report vs brute-force oracle
constexpr double kF1RecomputeTol = 1e-4;     // reference-report f1 recompute
constexpr double kCountRebuildTol = 2e-5;    // metrics from rebuilt counts
constexpr double kSharePctTol = 0.01;        // consensus share, percent points
constexpr double kCosineBudgetSec = 5.0;
constexpr double kOracleBudgetSec = 10.0;
constexpr double kRetryBudgetSec = 5.0;
constexpr double kPipelineBudgetSec = 30.0;

const std::filesystem::path kDataDir = SDGMAP_TEST_DATA_DIR;
const std::string kCliPath = SDGMAP_CLI_PATH;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool fail(std::string& why, std::string message) {
  why = std::move(message);
  return false;
}

std::filesystem::path fresh_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / leaf;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// ---------------------------------------------------------------------------
// Criterion 1: cosine kernel properties and the worked example.

Vector random_vector(std::mt19937& rng, std::size_t dim) {
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  Vector v;
  do {
    v.values.clear();
    for (std::size_t i = 0; i < dim; ++i) v.values.push_back(value(rng));
  } while (v.l2_norm() < 1e-6);
  return v;
}

bool criterion_cosine(std::string& why) {
  const auto start = Clock::now();
  std::mt19937 rng(11);
  std::uniform_int_distribution<std::size_t> dim_dist(2, 768);
  std::uniform_real_distribution<double> scale_dist(0.25, 4.0);

  for (int i = 0; i < 10'000; ++i) {
    const std::size_t dim = dim_dist(rng);
    const Vector a = random_vector(rng, dim);
    const Vector b = random_vector(rng, dim);

    const double ab = cosine_similarity(a, b);
    if (ab < -1.0 || ab > 1.0) {
      return fail(why, "similarity outside [-1, 1]: " + std::to_string(ab));
    }
    if (std::abs(ab - cosine_similarity(b, a)) > kPropertyTol) {
      return fail(why, "symmetry violated at pair " + std::to_string(i));
    }
    if (std::abs(cosine_similarity(a, a) - 1.0) > kPropertyTol) {
      return fail(why, "self-similarity drifted from 1 at pair " +
                           std::to_string(i));
    }
    Vector scaled = a;
    const double s = scale_dist(rng);
    for (double& value : scaled.values) value *= s;
    if (std::abs(cosine_similarity(scaled, b) - ab) > kPropertyTol) {
      return fail(why, "scale invariance violated at pair " +
                           std::to_string(i));
    }
  }

  const Vector u{{1.0, 2.0, 3.0}};
  const Vector v{{4.0, 5.0, 6.0}};
  if (std::abs(cosine_similarity(u, v) - 0.974632) > kWorkedExampleTol) {
    return fail(why, "worked example (1,2,3)x(4,5,6) missed 0.974632");
  }

  const double elapsed = seconds_since(start);
  if (elapsed >= kCosineBudgetSec) {
    return fail(why, "took " + std::to_string(elapsed) + " s, budget 5 s");
  }
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 2: classification report equals the brute-force oracle.

std::pair<LabelMatrix, LabelMatrix> random_instance(std::mt19937& rng, int n,
                                                    double density) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  LabelMatrix predicted, actual;
  for (int i = 0; i < n; ++i) {
    const std::string id = "s" + std::to_string(100 + i);
    predicted.publication_ids.push_back(id);
    actual.publication_ids.push_back(id);
    std::set<int> pred, act;
    for (int goal = 1; goal <= 17; ++goal) {
      if (coin(rng) < density) pred.insert(goal);
      if (coin(rng) < density) act.insert(goal);
    }
    predicted.labels.push_back(pred);
    actual.labels.push_back(act);
  }
  return {predicted, actual};
}

bool criterion_oracle(std::string& why) {
  const auto start = Clock::now();
  std::mt19937 rng(29);
  std::uniform_int_distribution<int> size_dist(1, 20);
  std::uniform_real_distribution<double> density_dist(0.05, 0.6);

  for (int trial = 0; trial < 500; ++trial) {
    auto [predicted, actual] =
        random_instance(rng, size_dist(rng), density_dist(rng));
    const auto rows = classification_report(predicted, actual);
    const auto expected =
        testsupport::oracle_report(predicted.labels, actual.labels);
    if (rows.size() != expected.size()) {
      return fail(why, "row count mismatch on trial " + std::to_string(trial));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].label != expected[i].label ||
          rows[i].support != expected[i].support ||
          std::abs(rows[i].precision - expected[i].precision) > kOracleTol ||
          std::abs(rows[i].recall - expected[i].recall) > kOracleTol ||
          std::abs(rows[i].f1 - expected[i].f1) > kOracleTol) {
        return fail(why, "row \"" + rows[i].label + "\" diverged on trial " +
                             std::to_string(trial));
      }
    }
  }

  const double elapsed = seconds_since(start);
  if (elapsed >= kOracleBudgetSec) {
    return fail(why, "took " + std::to_string(elapsed) + " s, budget 10 s");
  }
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 3: internal consistency of the reference classification report.

struct ReferenceRow {
  const char* label;
  double precision;
  double recall;
  double f1;
  std::size_t support;
};

// Full-scale evaluation of the similarity method against the LLM reference.
constexpr std::array<ReferenceRow, 21> kReferenceReport = {{
    {"SDG1", 0.386642, 0.516981, 0.442411, 795},
    {"SDG2", 0.439481, 0.778061, 0.561694, 392},
    {"SDG3", 0.743265, 0.305737, 0.433256, 1534},
    {"SDG4", 0.670011, 0.718573, 0.693443, 1766},
    {"SDG5", 0.641548, 0.463235, 0.538002, 680},
    {"SDG6", 0.339265, 0.682578, 0.453249, 419},
    {"SDG7", 0.527886, 0.636933, 0.577305, 639},
    {"SDG8", 0.573699, 0.392292, 0.465962, 2024},
    {"SDG9", 0.626650, 0.460083, 0.530601, 2167},
    {"SDG10", 0.484058, 0.176160, 0.258314, 1896},
    {"SDG11", 0.689772, 0.717678, 0.703448, 2274},
    {"SDG12", 0.512136, 0.802281, 0.625185, 1315},
    {"SDG13", 0.658367, 0.352721, 0.459347, 1874},
    {"SDG14", 0.155120, 0.741007, 0.256538, 139},
    {"SDG15", 0.337411, 0.693920, 0.454047, 477},
    {"SDG16", 0.481994, 0.343874, 0.401384, 1012},
    {"SDG17", 0.200930, 0.305516, 0.242424, 707},
    {"micro avg", 0.524889, 0.493933, 0.508941, 20110},
    {"macro avg", 0.498131, 0.534567, 0.476271, 20110},
    {"weighted avg", 0.569060, 0.493933, 0.501287, 20110},
    {"samples avg", 0.732922, 0.524073, 0.526730, 20110},
}};

bool criterion_reference_report(std::string& why) {
  // (a) Supports sum to the total carried by every average row.
  std::size_t total = 0;
  for (std::size_t i = 0; i < 17; ++i) total += kReferenceReport[i].support;
  if (total != 20110) {
    return fail(why, "per-goal supports sum to " + std::to_string(total));
  }
  for (std::size_t i = 17; i < kReferenceReport.size(); ++i) {
    if (kReferenceReport[i].support != total) {
      return fail(why, std::string(kReferenceReport[i].label) +
                           " support differs from the per-goal sum");
    }
  }

  // (b) Every per-goal f1 is the harmonic mean of its own precision/recall.
  for (std::size_t i = 0; i < 17; ++i) {
    const ReferenceRow& row = kReferenceReport[i];
    const double recomputed =
        2.0 * row.precision * row.recall / (row.precision + row.recall);
    if (std::abs(recomputed - row.f1) > kF1RecomputeTol) {
      return fail(why, std::string(row.label) + " f1 recomputes to " +
                           std::to_string(recomputed));
    }
  }

  // (c) The SDG1 row is consistent with integer confusion counts.
  const ReferenceRow& sdg1 = kReferenceReport[0];
  const long tp = std::lround(sdg1.recall * static_cast<double>(sdg1.support));
  const long fp =
      std::lround(static_cast<double>(tp) / sdg1.precision) - tp;
  if (tp != 411 || fp != 652) {
    return fail(why, "SDG1 rebuilt counts tp=" + std::to_string(tp) +
                         " fp=" + std::to_string(fp));
  }
  const Prf rebuilt = prf(ConfusionCounts{
      static_cast<std::size_t>(tp), static_cast<std::size_t>(fp),
      sdg1.support - static_cast<std::size_t>(tp), 0});
  if (std::abs(rebuilt.precision - sdg1.precision) > kCountRebuildTol ||
      std::abs(rebuilt.recall - sdg1.recall) > kCountRebuildTol) {
    return fail(why, "SDG1 metrics from counts 411/652/384 drifted");
  }

  // (d) Weighted recall is micro recall: exactly, in both the reference rows
  // and the implementation on random data.
  if (kReferenceReport[19].recall != kReferenceReport[17].recall) {
    return fail(why, "reference weighted and micro recall differ");
  }
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> size_dist(1, 20);
  for (int trial = 0; trial < 200; ++trial) {
    auto [predicted, actual] = random_instance(rng, size_dist(rng), 0.3);
    const auto rows = classification_report(predicted, actual);
    if (rows[19].recall != rows[17].recall) {  // bitwise
      return fail(why, "weighted recall != micro recall on trial " +
                           std::to_string(trial));
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 4: consensus arithmetic at the reference scale plus set algebra.

Connection nth_connection(std::size_t serial) {
  return {"s" + std::to_string(serial / 17),
          static_cast<int>(serial % 17) + 1};
}

ConnectionSet random_connections(std::mt19937& rng) {
  std::uniform_int_distribution<int> count(0, 50);
  std::uniform_int_distribution<int> pub(0, 25);
  std::uniform_int_distribution<int> goal(1, 17);
  ConnectionSet set;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    set.insert({"p" + std::to_string(pub(rng)), goal(rng)});
  }
  return set;
}

bool criterion_consensus(std::string& why) {
  // Distinct serials produce distinct connections, so the three blocks below
  // have exactly the intended cardinalities.
  ConnectionSet a, b;
  for (std::size_t serial = 0; serial < 9'933; ++serial) {
    const Connection c = nth_connection(serial);
    a.insert(c);
    b.insert(c);
  }
  for (std::size_t serial = 9'933; serial < 18'924; ++serial) {
    a.insert(nth_connection(serial));
  }
  for (std::size_t serial = 18'924; serial < 29'101; ++serial) {
    b.insert(nth_connection(serial));
  }

  const std::size_t pubs = 29'101 / 17 + 1;
  const ConsensusStats stats = consensus_stats(a, b, pubs);
  if (stats.size_a != 18'924 || stats.size_b != 20'110 ||
      stats.size_intersection != 9'933 || stats.size_union != 29'101) {
    return fail(why, "cardinalities off: union " +
                         std::to_string(stats.size_union));
  }
  if (std::abs(stats.share_of_union * 100.0 - 34.13) > kSharePctTol) {
    return fail(why, "share of union " +
                         std::to_string(stats.share_of_union * 100.0) + "%");
  }

  std::mt19937 rng(17);
  for (int trial = 0; trial < 1'000; ++trial) {
    const ConnectionSet x = random_connections(rng);
    const ConnectionSet y = random_connections(rng);
    const ConnectionSet common = intersect(x, y);
    if (common != intersect(y, x)) {
      return fail(why, "intersection not commutative on trial " +
                           std::to_string(trial));
    }
    if (common.size() > std::min(x.size(), y.size())) {
      return fail(why, "intersection exceeds the smaller set on trial " +
                           std::to_string(trial));
    }
    ConnectionSet merged = x;
    merged.insert(y.begin(), y.end());
    if (merged.size() + common.size() != x.size() + y.size()) {
      return fail(why, "union+intersection != sum of sizes on trial " +
                           std::to_string(trial));
    }
    if (intersect(x, x) != x) {
      return fail(why, "self-intersection changed the set on trial " +
                           std::to_string(trial));
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 5: the answer-parser fixtures and confidence buckets.

const std::string kAnswerWithLevels =
    "Based on the information provided, the publication aligns with the "
    "following Sustainable Development Goals (SDGs):"
    "1. Goal 7: Affordable and Clean Energy - confidence level: High (100%) - "
    "The publication directly relates to the use and promotion of renewable "
    "energy."
    "2. Goal 12: Responsible Consumption and Production - confidence level: "
    "High (90%) - The publication addresses responsible consumption and "
    "production by highlighting the positive impact of renewable energy and "
    "sustainable business practices."
    "3. Goal 13: Climate Action - confidence level: Medium (70%) - Although "
    "the focus is on consumer behavior rather than direct climate action, the "
    "publication indirectly supports efforts towards mitigating climate "
    "change through promoting renewable energy."
    "4. Goal 9: Industry, Innovation, and Infrastructure -confidence level: "
    "Medium (60%) - While it does not directly address innovation and "
    "infrastructure, the publication suggests that firms can leverage "
    "renewable energy as a marketing strategy, which aligns with the goal of "
    "fostering innovation in industries."
    "5. Goal 15: Life on Land - confidence level: Low (30%)";

const std::string kAnswerWithBarePercentages =
    "The publication aligns with the following SDGs:"
    "1. Sustainable Cities and Communities (SDG 11) - 90% confidence level: "
    "The publication discusses the need for sustainable urban development and "
    "the importance of accommodating population growth in cities. It also "
    "mentions the international recognition of Australia's cities' "
    "liveability."
    "2. Responsible Consumption and Production (SDG 12) - 80% confidence "
    "level: The publication highlights the unsustainable and inequitable "
    "levels of resource consumption in Australia's cities. It emphasizes the "
    "need for sustainable consumption practices to achieve a sustainable "
    "population."
    "The goals are listed in descending order of confidence level, with SDG "
    "11 listed first.";

const std::string kAnswerTrailingConfidence =
    "Goal 15: Life on Land - Although not explicitly mentioned in the "
    "publication, promoting renewable energy can indirectly contribute to the "
    "conservation of terrestrial ecosystems and biodiversity. Confidence "
    "level: Low (30%).";

bool criterion_parser(std::string& why) {
  const auto first = parse_llm_output(kAnswerWithLevels);
  const std::vector<int> goals_expected = {7, 12, 13, 9, 15};
  const std::vector<int> pcts_expected = {100, 90, 70, 60, 30};
  const std::vector<ConfidenceLevel> levels_expected = {
      ConfidenceLevel::High, ConfidenceLevel::High, ConfidenceLevel::Medium,
      ConfidenceLevel::Medium, ConfidenceLevel::Low};
  if (first.size() != 5) {
    return fail(why, "level-dialect fixture parsed to " +
                         std::to_string(first.size()) + " assignments");
  }
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (first[i].goal != goals_expected[i] ||
        first[i].confidence_pct != pcts_expected[i] ||
        first[i].level != levels_expected[i]) {
      return fail(why, "level-dialect assignment " + std::to_string(i) +
                           " wrong");
    }
  }
  if (first[0].reason !=
      "The publication directly relates to the use and promotion of "
      "renewable energy.") {
    return fail(why, "first reason text wrong");
  }
  if (!first[4].reason.empty()) {
    return fail(why, "goal 15 should carry no reason");
  }

  const auto second = parse_llm_output(kAnswerWithBarePercentages);
  if (second.size() != 2 || second[0].goal != 11 ||
      second[0].confidence_pct != 90 || second[0].level.has_value() ||
      second[1].goal != 12 || second[1].confidence_pct != 80 ||
      second[1].level.has_value()) {
    return fail(why, "bare-percentage fixture parsed wrong");
  }
  if (second[0].reason.find("sustainable urban development") ==
      std::string::npos) {
    return fail(why, "bare-percentage reason text wrong");
  }

  const auto third = parse_llm_output(kAnswerTrailingConfidence);
  if (third.size() != 1 || third[0].goal != 15 ||
      third[0].confidence_pct != 30 ||
      third[0].level != ConfidenceLevel::Low) {
    return fail(why, "trailing-confidence fixture parsed wrong");
  }

  const auto kept = filter_assignments(first, 60);
  std::vector<int> kept_goals;
  for (const GoalAssignment& assignment : kept) {
    kept_goals.push_back(assignment.goal);
  }
  if (kept_goals != std::vector<int>{7, 12, 13, 9}) {
    return fail(why, "filter at 60 kept the wrong goals");
  }

  if (classify_confidence(59) != ConfidenceLevel::Low ||
      classify_confidence(60) != ConfidenceLevel::Medium ||
      classify_confidence(80) != ConfidenceLevel::High) {
    return fail(why, "bucket boundaries violated");
  }
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 6: retry counts against a scripted endpoint, and batch resume.

bool criterion_retry(std::string& why) {
  const auto start = Clock::now();
  RetryPolicy fast;
  fast.sleep = std::chrono::milliseconds(5);
  fast.max_attempts = 5;

  {
    testsupport::ScriptedChatServer server(
        {{502, ""}, {502, ""}, {200, "Goal 7 (90%)"}});
    ChatClientConfig client;
    client.endpoint = server.endpoint();
    ChatRequest request;
    request.messages.push_back({"user", "tag this"});
    const std::string content = complete_with_retry(client, request, fast);
    if (server.requests() != 3) {
      return fail(why, "fail-fail-succeed made " +
                           std::to_string(server.requests()) + " requests");
    }
    const auto parsed = parse_llm_output(content);
    if (parsed.size() != 1 || parsed[0].goal != 7 ||
        parsed[0].confidence_pct != 90) {
      return fail(why, "recovered answer did not parse");
    }
  }

  {
    testsupport::ScriptedChatServer server({{502, ""}});
    ChatClientConfig client;
    client.endpoint = server.endpoint();
    ChatRequest request;
    request.messages.push_back({"user", "tag this"});
    RetryPolicy three = fast;
    three.max_attempts = 3;
    bool exhausted = false;
    try {
      complete_with_retry(client, request, three);
    } catch (const RetriesExhausted&) {
      exhausted = true;
    }
    if (!exhausted) {
      return fail(why, "permanent failure did not raise RetriesExhausted");
    }
    if (server.requests() != 3) {
      return fail(why, "permanent failure made " +
                           std::to_string(server.requests()) + " requests");
    }
  }

  {
    const auto dir = fresh_dir("sdgmap_accept_resume");
    std::string pubs;
    for (int i = 1; i <= 4; ++i) {
      pubs += R"({"id":"r)" + std::to_string(i) +
              R"(","title":"Publication )" + std::to_string(i) +
              R"(","abstract":"Text.","type":"journal article","year":2020,"authors":[]})"
              "\n";
    }
    write_file(dir / "pubs.jsonl", pubs);

    testsupport::MockServer server(
        "/chat/completions",
        [](const httplib::Request&, httplib::Response& res) {
          res.set_content(
              testsupport::chat_success_body("Goal 7 (90%) energy access."),
              "application/json");
        });

    RunConfig config;
    config.publications_path = dir / "pubs.jsonl";
    config.output_dir = dir;
    config.llm_endpoint = server.base_url();
    config.retry_sleep_seconds = 0.005;
    config.retry_max_attempts = 2;

    cmd_tag_llm(config);
    if (server.requests() != 4) {
      return fail(why, "first batch made " +
                           std::to_string(server.requests()) + " requests");
    }
    cmd_tag_llm(config);
    if (server.requests() != 4) {
      return fail(why, "resume of a finished batch re-sent requests");
    }

    // Keep two answers, forget two; the resume sends exactly the missing two.
    const LlmTagFile file = read_llm_tag_file(dir / "llm_tags.jsonl");
    write_file(dir / "llm_tags.jsonl",
               to_json_line(file.results[0]) + "\n" +
                   to_json_line(file.results[1]) + "\n");
    cmd_tag_llm(config);
    if (server.requests() != 6) {
      return fail(why, "partial resume made " +
                           std::to_string(server.requests()) +
                           " total requests, expected 6");
    }
    const std::vector<LlmTagResult> final_tags =
        read_llm_tags(dir / "llm_tags.jsonl");
    std::set<std::string> ids;
    for (const LlmTagResult& result : final_tags) {
      ids.insert(result.publication_id);
    }
    if (final_tags.size() != 4 || ids.size() != 4) {
      return fail(why, "resume produced duplicate or missing ids");
    }
  }

  const double elapsed = seconds_since(start);
  if (elapsed >= kRetryBudgetSec) {
    return fail(why, "took " + std::to_string(elapsed) + " s, budget 5 s");
  }
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 7: the full pipeline is byte-deterministic across two runs.

int run_cli(const std::string& args) {
  const std::string command = kCliPath + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string run_pipeline(const std::filesystem::path& dir,
                         const std::string& llm_endpoint) {
  const std::string corpus = (kDataDir / "sdg_corpus.json").string();
  const std::string pubs = (kDataDir / "publications.jsonl").string();
  const std::string out = dir.string();

  const std::vector<std::pair<std::string, std::string>> stages = {
      {"vectorize", "vectorize --corpus " + corpus + " --output-dir " + out +
                        " --dim 192"},
      {"tag-sim", "tag-sim --corpus " + corpus + " --publications " + pubs +
                      " --output-dir " + out + " --dim 192 --threshold 0.1"},
      {"tag-llm", "tag-llm --publications " + pubs + " --output-dir " + out +
                      " --llm-endpoint " + llm_endpoint +
                      " --retry-sleep 0.01 --retry-attempts 2"},
      {"hybrid", "hybrid --sim " + out + "/sim_tags.jsonl --llm " + out +
                     "/llm_tags.jsonl --output-dir " + out},
      {"evaluate", "evaluate --predicted " + out + "/sim_tags.jsonl "
                       "--reference " + out + "/llm_tags.jsonl --output-dir " +
                       out},
  };
  for (const auto& [name, args] : stages) {
    const int code = run_cli(args);
    if (code != 0) {
      return name + " exited with code " + std::to_string(code);
    }
  }
  return {};
}

bool criterion_pipeline(std::string& why) {
  const auto start = Clock::now();

  testsupport::RoutedChatServer server(
      {
          {"Gradient boosting",
           "This publication is purely methodological and does not align "
           "with any of the Sustainable Development Goals."},
          {"Phonon spectra",
           "1. Goal 9: Industry, Innovation and Infrastructure - Confidence "
           "level: High - strain engineering relates loosely to advanced "
           "materials."},
          {"renewable energy",
           "1. Goal 7: Affordable and Clean Energy - confidence level: High "
           "(95%) - Directly about renewable energy.\n"
           "2. Goal 13: Climate Action - confidence level: Medium (75%) - "
           "Emission cuts follow from clean energy.\n"
           "3. Goal 12: Responsible Consumption and Production - confidence "
           "level: Medium (65%) - Sustainable production patterns."},
          {"cities",
           "1. Sustainable Cities and Communities (SDG 11) - 90% confidence "
           "level: Urban sustainability is the core topic.\n"
           "2. SDG 13 (70%) - climate resilience in cities.\n"
           "3. SDG 1 (40%) - the poverty dimension is secondary."},
          {"marine",
           "1. Goal 14: Life Below Water (92%) - ocean conservation.\n"
           "2. Goal 2 (60%) - food security from fisheries."},
      },
      "1. Goal 11 (90%)\n2. Goal 12 (85%)\n3. Goal 7 (80%)\n"
      "4. Goal 3 (75%)\n5. Goal 13 (70%)\n6. Goal 4 (65%)\n"
      "7. Goal 1 (60%)\n8. Goal 6 (60%)\n9. Goal 8 (60%)\n"
      "10. Goal 15 (60%)");

  const auto run1 = fresh_dir("sdgmap_accept_run1");
  const auto run2 = fresh_dir("sdgmap_accept_run2");
  for (const auto& dir : {run1, run2}) {
    const std::string error = run_pipeline(dir, server.endpoint());
    if (!error.empty()) {
      return fail(why, "run in " + dir.filename().string() + ": " + error);
    }
  }

  const std::vector<std::string> outputs = {
      "goal_vectors.json",  "sim_tags.jsonl",     "score_histogram.csv",
      "goal_distribution.csv", "llm_tags.jsonl",  "consensus.json",
      "cooccurrence.json",  "report.csv",
  };
  for (const std::string& name : outputs) {
    if (!std::filesystem::exists(run1 / name)) {
      return fail(why, name + " missing");
    }
    if (slurp(run1 / name) != slurp(run2 / name)) {
      return fail(why, name + " differs between runs");
    }
  }

  const double elapsed = seconds_since(start);
  if (elapsed >= kPipelineBudgetSec) {
    return fail(why, "took " + std::to_string(elapsed) + " s, budget 30 s");
  }
  return true;
}

// ---------------------------------------------------------------------------
// Criterion 8: threshold 0.4 keeps exactly the reference goals.

bool criterion_threshold(std::string& why) {
  SdgScoreVector first;
  first.publication_id = "row1";
  first.scores = {{1, 0.12},  {2, 0.21},  {3, 0.19}, {4, 0.15},  {5, 0.16},
                  {6, 0.18},  {7, 0.41},  {8, 0.17}, {9, 0.22},  {10, 0.14},
                  {11, 0.15}, {12, 0.44}, {13, 0.30}, {14, 0.25}, {15, 0.20},
                  {16, 0.12}, {17, 0.23}};
  SdgScoreVector second;
  second.publication_id = "row2";
  second.scores = {{1, 0.44},  {2, 0.36},  {3, 0.42},  {4, 0.46},  {5, 0.30},
                   {6, 0.45},  {7, 0.40},  {8, 0.47},  {9, 0.41},  {10, 0.39},
                   {11, 0.60}, {12, 0.55}, {13, 0.44}, {14, 0.40}, {15, 0.45},
                   {16, 0.36}, {17, 0.37}};

  auto kept_goals = [](const TagResult& result) {
    std::vector<int> goals;
    for (const TaggedGoal& tag : result.tags) goals.push_back(tag.goal);
    return goals;
  };

  const TagResult row1 = apply_threshold(first, 0.4);
  if (kept_goals(row1) != std::vector<int>{12, 7}) {
    return fail(why, "first row kept " + std::to_string(row1.tags.size()) +
                         " goals, want {12, 7}");
  }

  const TagResult row2 = apply_threshold(second, 0.4);
  const std::vector<int> expected = {11, 12, 8, 4, 6, 15, 1, 13, 3, 9, 7, 14};
  if (kept_goals(row2) != expected) {
    return fail(why, "second row kept " + std::to_string(row2.tags.size()) +
                         " goals, want the 12 at or above 0.40");
  }
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    bool (*run)(std::string&);
  };
  const Criterion criteria[] = {
      {"criterion 1: cosine kernel properties", criterion_cosine},
      {"criterion 2: report matches the brute-force oracle", criterion_oracle},
      {"criterion 3: reference report internal consistency",
       criterion_reference_report},
      {"criterion 4: consensus set arithmetic", criterion_consensus},
      {"criterion 5: answer parser fixtures", criterion_parser},
      {"criterion 6: retry and resume behavior", criterion_retry},
      {"criterion 7: end-to-end determinism", criterion_pipeline},
      {"criterion 8: threshold keeps the reference goals", criterion_threshold},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    std::string why;
    bool passed = false;
    const auto start = Clock::now();
    try {
      passed = criterion.run(why);
    } catch (const std::exception& e) {
      why = std::string("unexpected exception: ") + e.what();
    }
    const double elapsed = seconds_since(start);
    if (passed) {
      std::printf("PASS  %s (%.2f s)\n", criterion.name, elapsed);
    } else {
      std::printf("FAIL  %s (%.2f s) — %s\n", criterion.name, elapsed,
                  why.c_str());
      ++failures;
    }
  }
  if (failures == 0) {
    std::printf("all 8 acceptance criteria passed\n");
  } else {
    std::printf("%d of 8 acceptance criteria failed\n", failures);
  }
  return failures;
}
