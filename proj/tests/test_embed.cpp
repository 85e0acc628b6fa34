#include "sdgmap/embed.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "mock_servers.hpp"

#include <json.hpp>

using namespace sdgmap;

namespace {

Vector vec(std::vector<double> values) { return Vector{std::move(values)}; }

Vector random_vector(std::mt19937& rng, std::size_t dim) {
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  Vector v;
  v.values.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) v.values.push_back(dist(rng));
  return v;
}

}  // namespace

TEST_SUITE("embed") {

TEST_CASE("cosine of a worked example") {
  const double s = cosine_similarity(vec({1, 2, 3}), vec({4, 5, 6}));
  CHECK(std::abs(s - 0.974632) < 1e-6);
}

TEST_CASE("cosine of identical and opposite vectors") {
  const Vector a = vec({0.3, -1.2, 4.0, 0.5});
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  Vector neg = a;
  for (double& x : neg.values) x = -x;
  CHECK(cosine_similarity(a, neg) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("cosine of orthogonal vectors is zero") {
  CHECK(cosine_similarity(vec({1, 0}), vec({0, 1})) == doctest::Approx(0.0));
}

TEST_CASE("cosine is symmetric bitwise") {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    const Vector a = random_vector(rng, 16);
    const Vector b = random_vector(rng, 16);
    CHECK(cosine_similarity(a, b) == cosine_similarity(b, a));
  }
}

TEST_CASE("cosine is scale invariant and stays in range") {
  std::mt19937 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Vector a = random_vector(rng, 24);
    const Vector b = random_vector(rng, 24);
    const double s = cosine_similarity(a, b);
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);

    Vector scaled = a;
    for (double& x : scaled.values) x *= 1000.0;
    CHECK(std::abs(cosine_similarity(scaled, b) - s) < 1e-9);
  }
}

TEST_CASE("cosine rejects mismatched dimensions and zero vectors") {
  CHECK_THROWS_AS(cosine_similarity(vec({1, 2}), vec({1, 2, 3})),
                  DimensionMismatch);
  CHECK_THROWS_AS(cosine_similarity(vec({0, 0, 0}), vec({1, 2, 3})),
                  ZeroVector);
  CHECK_THROWS_AS(cosine_similarity(vec({1, 2, 3}), vec({1e-13, 0, 0})),
                  ZeroVector);
}

TEST_CASE("fnv1a_64 matches the published test vectors") {
  CHECK(fnv1a_64("") == 14695981039346656037ull);
  CHECK(fnv1a_64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a_64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("hash_embed is deterministic and unit length") {
  const Vector a = hash_embed("Renewable energy for sustainable cities", 64);
  const Vector b = hash_embed("Renewable energy for sustainable cities", 64);
  CHECK(a == b);
  CHECK(a.dim() == 64);
  CHECK(a.l2_norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hash_embed("some text").dim() == kDefaultEmbeddingDim);
}

TEST_CASE("hash_embed ignores token order") {
  CHECK(hash_embed("solar wind energy", 128) ==
        hash_embed("energy solar wind", 128));
}

TEST_CASE("hash_embed ignores case and punctuation") {
  CHECK(hash_embed("Solar-Energy!", 128) == hash_embed("solar energy", 128));
}

TEST_CASE("hash_embed direction is count-independent for a single token") {
  CHECK(hash_embed("energy energy", 128) == hash_embed("energy", 128));
}

TEST_CASE("different texts land on different vectors") {
  CHECK_FALSE(hash_embed("marine pollution", 256) ==
              hash_embed("tax capacity", 256));
}

TEST_CASE("hash_embed rejects token-free text") {
  CHECK_THROWS_AS(hash_embed(""), EmptyText);
  CHECK_THROWS_AS(hash_embed("!!! ... ???"), EmptyText);
}

TEST_CASE("hashing provider embeds batches like the free function") {
  HashingProvider provider(96);
  CHECK(provider.dim() == 96);
  CHECK(provider.identity() == "hash-fnv1a-96");

  const std::vector<std::string> texts = {"clean water", "climate action",
                                          "zero hunger"};
  auto vectors = provider.embed(texts);
  REQUIRE(vectors.size() == 3);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    CHECK(vectors[i] == hash_embed(texts[i], 96));
  }
}

TEST_CASE("remote provider round-trips vectors in order") {
  testsupport::MockServer server(
      "/embed", [](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body);
        nlohmann::json reply;
        reply["vectors"] = nlohmann::json::array();
        for (const auto& text : body.at("texts")) {
          const double len =
              static_cast<double>(text.get<std::string>().size());
          reply["vectors"].push_back({len, len + 1.0, len + 2.0});
        }
        res.set_content(reply.dump(), "application/json");
      });

  RemoteEmbedConfig config;
  config.endpoint = server.base_url() + "/embed";
  config.dim = 3;
  config.batch_size = 2;
  RemoteProvider provider(config);
  CHECK(provider.dim() == 3);
  CHECK(provider.identity() == "remote-" + config.endpoint + "-3");

  const std::vector<std::string> texts = {"a", "bb", "ccc", "dddd", "eeeee"};
  auto vectors = provider.embed(texts);
  REQUIRE(vectors.size() == 5);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    CHECK(vectors[i].values[0] == doctest::Approx(double(texts[i].size())));
  }
  CHECK(server.requests() == 3);  // ceil(5 / 2) batches
}

TEST_CASE("remote provider rejects a reply with wrong arity") {
  testsupport::MockServer server(
      "/embed", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"vectors": [[1.0, 2.0, 3.0]]})",
                        "application/json");
      });
  RemoteEmbedConfig config;
  config.endpoint = server.base_url() + "/embed";
  config.dim = 3;
  RemoteProvider provider(config);
  const std::vector<std::string> texts = {"one", "two"};
  CHECK_THROWS_AS(provider.embed(texts), ProtocolError);
}

TEST_CASE("remote provider rejects wrong-width vectors") {
  testsupport::MockServer server(
      "/embed", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"vectors": [[1.0, 2.0]]})", "application/json");
      });
  RemoteEmbedConfig config;
  config.endpoint = server.base_url() + "/embed";
  config.dim = 3;
  RemoteProvider provider(config);
  const std::vector<std::string> texts = {"one"};
  CHECK_THROWS_AS(provider.embed(texts), DimensionMismatch);
}

TEST_CASE("remote provider maps HTTP failures to TransportError") {
  testsupport::MockServer server(
      "/embed", [](const httplib::Request&, httplib::Response& res) {
        res.status = 503;
        res.set_content("overloaded", "text/plain");
      });
  RemoteEmbedConfig config;
  config.endpoint = server.base_url() + "/embed";
  config.dim = 3;
  RemoteProvider provider(config);
  const std::vector<std::string> texts = {"one"};
  CHECK_THROWS_AS(provider.embed(texts), TransportError);
}

TEST_CASE("remote provider maps unreachable hosts to TransportError") {
  RemoteEmbedConfig config;
  config.endpoint = "http://127.0.0.1:1/embed";  // nothing listens here
  config.dim = 3;
  config.timeout_seconds = 2;
  RemoteProvider provider(config);
  const std::vector<std::string> texts = {"one"};
  CHECK_THROWS_AS(provider.embed(texts), TransportError);
}

TEST_CASE("remote provider rejects non-JSON replies") {
  testsupport::MockServer server(
      "/embed", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("this is not json", "text/plain");
      });
  RemoteEmbedConfig config;
  config.endpoint = server.base_url() + "/embed";
  config.dim = 3;
  RemoteProvider provider(config);
  const std::vector<std::string> texts = {"one"};
  CHECK_THROWS_AS(provider.embed(texts), ProtocolError);
}

TEST_CASE("remote provider honours the in-flight bound") {
  std::atomic<int> active{0};
  std::atomic<int> peak{0};
  testsupport::MockServer server(
      "/embed", [&](const httplib::Request& req, httplib::Response& res) {
        const int now = ++active;
        int seen = peak.load();
        while (now > seen && !peak.compare_exchange_weak(seen, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(30));
        const auto body = nlohmann::json::parse(req.body);
        nlohmann::json reply;
        reply["vectors"] = nlohmann::json::array();
        for (std::size_t i = 0; i < body.at("texts").size(); ++i) {
          reply["vectors"].push_back({1.0, 0.0});
        }
        --active;
        res.set_content(reply.dump(), "application/json");
      });

  RemoteEmbedConfig config;
  config.endpoint = server.base_url() + "/embed";
  config.dim = 2;
  config.batch_size = 1;
  config.max_in_flight = 2;
  RemoteProvider provider(config);

  std::vector<std::string> texts;
  for (int i = 0; i < 10; ++i) texts.push_back("text " + std::to_string(i));
  auto vectors = provider.embed(texts);
  CHECK(vectors.size() == 10);
  CHECK(server.requests() == 10);
  CHECK(peak.load() <= 2);
  CHECK(peak.load() >= 1);
}

}  // TEST_SUITE
