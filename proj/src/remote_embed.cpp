#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sdgmap/embed.hpp"
#include "url_split.hpp"

namespace sdgmap {

namespace {

// Runtime-sized counting semaphore; std::counting_semaphore fixes its ceiling
// at compile time, which does not fit a config-driven in-flight bound.
class Semaphore {
 public:
  explicit Semaphore(std::size_t slots) : slots_(slots) {}

  void acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return slots_ > 0; });
    --slots_;
  }
  void release() {
    {
      std::lock_guard lock(mutex_);
      ++slots_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t slots_;
};

struct SlotGuard {
  Semaphore& sem;
  explicit SlotGuard(Semaphore& s) : sem(s) { sem.acquire(); }
  ~SlotGuard() { sem.release(); }
};

}  // namespace

struct RemoteProvider::Impl {
  RemoteEmbedConfig config;
  detail::SplitUrl url;
  Semaphore in_flight;

  explicit Impl(RemoteEmbedConfig cfg)
      : config(std::move(cfg)),
        url(detail::split_url(config.endpoint)),
        in_flight(config.max_in_flight == 0 ? 1 : config.max_in_flight) {}

  std::vector<Vector> request_batch(std::span<const std::string> texts) {
    nlohmann::json body;
    body["texts"] = std::vector<std::string>(texts.begin(), texts.end());

    httplib::Result result;
    {
      SlotGuard guard(in_flight);
      httplib::Client client(url.base);
      client.set_connection_timeout(config.timeout_seconds, 0);
      client.set_read_timeout(config.timeout_seconds, 0);
      result = client.Post(url.path, body.dump(), "application/json");
    }
    if (!result) {
      throw TransportError("embedding request failed: " +
                           httplib::to_string(result.error()));
    }
    if (result->status < 200 || result->status >= 300) {
      throw TransportError("embedding service returned HTTP " +
                           std::to_string(result->status));
    }

    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError("embedding reply is not JSON: " + std::string(e.what()));
    }
    if (!reply.is_object() || !reply.contains("vectors") ||
        !reply.at("vectors").is_array()) {
      throw ProtocolError("embedding reply lacks a \"vectors\" array");
    }
    const auto& rows = reply.at("vectors");
    if (rows.size() != texts.size()) {
      throw ProtocolError("embedding reply has " + std::to_string(rows.size()) +
                          " vectors for " + std::to_string(texts.size()) +
                          " texts");
    }
    std::vector<Vector> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
      if (!row.is_array()) {
        throw ProtocolError("embedding vector is not an array");
      }
      Vector vec;
      vec.values.reserve(row.size());
      for (const auto& v : row) {
        if (!v.is_number()) {
          throw ProtocolError("embedding vector holds a non-numeric entry");
        }
        vec.values.push_back(v.get<double>());
      }
      if (vec.dim() != config.dim) {
        throw DimensionMismatch("embedding service returned dim " +
                                std::to_string(vec.dim()) + ", expected " +
                                std::to_string(config.dim));
      }
      out.push_back(std::move(vec));
    }
    return out;
  }
};

RemoteProvider::RemoteProvider(RemoteEmbedConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

RemoteProvider::~RemoteProvider() = default;

std::size_t RemoteProvider::dim() const { return impl_->config.dim; }

std::string RemoteProvider::identity() const {
  return "remote-" + impl_->config.endpoint + "-" +
         std::to_string(impl_->config.dim);
}

std::vector<Vector> RemoteProvider::embed(std::span<const std::string> texts) {
  const std::size_t batch = impl_->config.batch_size == 0
                                ? texts.size()
                                : impl_->config.batch_size;
  std::vector<std::span<const std::string>> batches;
  for (std::size_t start = 0; start < texts.size(); start += batch) {
    batches.push_back(texts.subspan(start, std::min(batch, texts.size() - start)));
  }

  std::vector<std::vector<Vector>> results(batches.size());
  std::vector<std::exception_ptr> errors(batches.size());
  std::vector<std::thread> workers;
  workers.reserve(batches.size());
  for (std::size_t i = 0; i < batches.size(); ++i) {
    workers.emplace_back([&, i] {
      try {
        results[i] = impl_->request_batch(batches[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (std::thread& t : workers) t.join();
  for (const std::exception_ptr& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  std::vector<Vector> out;
  out.reserve(texts.size());
  for (std::vector<Vector>& chunk : results) {
    for (Vector& vec : chunk) out.push_back(std::move(vec));
  }
  return out;
}

}  // namespace sdgmap
