#include "sdgmap/embed.hpp"

#include <cctype>
#include <cmath>

namespace sdgmap {

namespace {

constexpr double kNormEpsilon = 1e-12;

}  // namespace

double Vector::l2_norm() const {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum);
}

double cosine_similarity(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("cosine: dimensions differ (" +
                            std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()) + ")");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
  }
  const double norm_a = a.l2_norm();
  const double norm_b = b.l2_norm();
  if (norm_a < kNormEpsilon || norm_b < kNormEpsilon) {
    throw ZeroVector("cosine undefined for a zero-magnitude vector");
  }
  double cos = dot / (norm_a * norm_b);
  if (cos > 1.0) cos = 1.0;
  if (cos < -1.0) cos = -1.0;
  return cos;
}

std::uint64_t fnv1a_64(const std::string& token) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : token) {
    hash ^= static_cast<std::uint64_t>(c);
    hash *= 1099511628211ull;
  }
  return hash;
}

Vector hash_embed(const std::string& text, std::size_t dim) {
  if (dim == 0) {
    throw DimensionMismatch("embedding dimension must be positive");
  }
  Vector vec;
  vec.values.assign(dim, 0.0);

  bool saw_token = false;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    saw_token = true;
    const std::uint64_t h = fnv1a_64(token);
    const std::size_t bucket = static_cast<std::size_t>(h % dim);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    vec.values[bucket] += sign;
    token.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      token.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();

  if (!saw_token) {
    throw EmptyText("no tokens in text");
  }
  const double norm = vec.l2_norm();
  if (norm < kNormEpsilon) {
    throw ZeroVector("token signs cancelled to a zero vector");
  }
  for (double& v : vec.values) v /= norm;
  return vec;
}

HashingProvider::HashingProvider(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) {
    throw DimensionMismatch("embedding dimension must be positive");
  }
}

std::string HashingProvider::identity() const {
  return "hash-fnv1a-" + std::to_string(dim_);
}

std::vector<Vector> HashingProvider::embed(std::span<const std::string> texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) {
    out.push_back(hash_embed(text, dim_));
  }
  return out;
}

}  // namespace sdgmap
