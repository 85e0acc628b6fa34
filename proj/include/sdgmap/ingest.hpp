#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdgmap/errors.hpp"

namespace sdgmap {

/// One research output. `pub_type` is free text, lower-cased and trimmed on
/// ingest. A missing abstract is allowed; a missing id or title is not.
struct Publication {
  std::string id;
  std::string title;
  std::string abstract;
  std::string pub_type;
  std::optional<int> year;
  std::vector<std::string> authors;

  bool operator==(const Publication&) const = default;
};

enum class PubFormat { Csv, Jsonl };

/// Reads publications from a CSV file (columns id,title,abstract,type,year,
/// authors with semicolon-separated authors, RFC-4180 quoting, header row
/// required) or a JSONL file (one object per line, same field names).
/// Input order is preserved. Throws MalformedRecord naming the offending
/// line, or DuplicateId when two records share an id.
std::vector<Publication> read_publications(const std::filesystem::path& path,
                                           PubFormat format);

/// Writes publications in either format; read_publications(write(...)) is
/// lossless for round-trippable fields.
void write_publications(const std::filesystem::path& path,
                        std::span<const Publication> pubs, PubFormat format);

/// Text used for embedding: title + single space + abstract, or the title
/// alone when the abstract is empty.
std::string publication_text(const Publication& pub);

struct TypeDistribution {
  std::map<std::string, std::size_t> counts;
  std::map<std::string, double> shares;
};

/// Counts and shares per publication type; empty input yields empty maps.
TypeDistribution type_distribution(std::span<const Publication> pubs);

}  // namespace sdgmap
