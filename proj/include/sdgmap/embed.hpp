#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sdgmap/errors.hpp"

namespace sdgmap {

// Dense embedding vector. All vectors flowing through one pipeline share a
// single dimension; mismatches surface as DimensionMismatch at the point of
// comparison.
struct Vector {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  double l2_norm() const;

  bool operator==(const Vector&) const = default;
};

// Cosine of the angle between a and b, clamped to [-1, 1].
// Throws DimensionMismatch when dimensions differ and ZeroVector when either
// norm falls below 1e-12.
double cosine_similarity(const Vector& a, const Vector& b);

inline constexpr std::size_t kDefaultEmbeddingDim = 768;

// Deterministic local embedder: lowercases, splits on non-alphanumeric ASCII,
// buckets each token by FNV-1a 64-bit hash into `dim` signed slots, then
// L2-normalizes. Throws EmptyText when no token survives tokenization and
// ZeroVector when the bucketed signs cancel exactly.
Vector hash_embed(const std::string& text, std::size_t dim = kDefaultEmbeddingDim);

std::uint64_t fnv1a_64(const std::string& token);

// Source of embeddings for a batch of texts. identity() feeds cache keys so
// vectors produced by different providers never collide on disk.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string identity() const = 0;
  virtual std::vector<Vector> embed(std::span<const std::string> texts) = 0;
};

class HashingProvider final : public EmbeddingProvider {
 public:
  explicit HashingProvider(std::size_t dim = kDefaultEmbeddingDim);

  std::size_t dim() const override { return dim_; }
  std::string identity() const override;
  std::vector<Vector> embed(std::span<const std::string> texts) override;

 private:
  std::size_t dim_;
};

struct RemoteEmbedConfig {
  std::string endpoint;            // e.g. http://host:port/embed
  std::size_t dim = kDefaultEmbeddingDim;
  std::size_t batch_size = 32;     // texts per request
  std::size_t max_in_flight = 4;   // concurrent requests across threads
  int timeout_seconds = 30;
};

// HTTP client for an embedding service speaking
//   POST {"texts": [...]} -> {"vectors": [[...], ...]}.
// Connection failures raise TransportError, malformed replies ProtocolError,
// and wrong-width vectors DimensionMismatch. At most max_in_flight requests
// are outstanding at any moment, however many threads call embed().
class RemoteProvider final : public EmbeddingProvider {
 public:
  explicit RemoteProvider(RemoteEmbedConfig config);
  ~RemoteProvider() override;

  std::size_t dim() const override;
  std::string identity() const override;
  std::vector<Vector> embed(std::span<const std::string> texts) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sdgmap
