#include "sdgmap/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace sdgmap {

namespace {

const std::vector<std::string> kCsvHeader = {"id",   "title", "abstract",
                                             "type", "year",  "authors"};

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string normalize_type(const std::string& raw) {
  std::string out = trim(raw);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

struct CsvRecord {
  std::size_t line = 0;  // physical line where the record starts, 1-based
  std::vector<std::string> fields;
};

// Strict RFC-4180 reader. Quoted fields may contain commas, quotes (doubled)
// and newlines; record boundaries are unquoted LF or CRLF.
std::vector<CsvRecord> read_csv(const std::string& content) {
  std::vector<CsvRecord> records;
  CsvRecord record;
  record.line = 1;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  std::size_t line = 1;
  bool record_has_content = false;

  auto end_field = [&] {
    record.fields.push_back(field);
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&](std::size_t next_line) {
    end_field();
    records.push_back(std::move(record));
    record = CsvRecord{};
    record.line = next_line;
    record_has_content = false;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field.empty() && !field_was_quoted) {
          in_quotes = true;
          field_was_quoted = true;
          record_has_content = true;
        } else {
          throw MalformedRecord(record.line, "stray quote in CSV field");
        }
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        if (i + 1 < content.size() && content[i + 1] == '\n') break;
        throw MalformedRecord(record.line, "bare carriage return in CSV");
      case '\n':
        ++line;
        if (record_has_content || !field.empty() || !record.fields.empty()) {
          end_record(line);
        } else {
          record.line = line;  // skip empty line
        }
        break;
      default:
        field.push_back(c);
        record_has_content = true;
        break;
    }
  }
  if (in_quotes) {
    throw MalformedRecord(record.line, "unterminated quoted CSV field");
  }
  if (record_has_content || !field.empty() || !record.fields.empty()) {
    end_record(line);
  }
  return records;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> split_authors(const std::string& field) {
  std::vector<std::string> authors;
  if (field.empty()) return authors;
  std::string current;
  for (char c : field) {
    if (c == ';') {
      authors.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  authors.push_back(current);
  return authors;
}

std::string join_authors(const std::vector<std::string>& authors) {
  std::string out;
  for (std::size_t i = 0; i < authors.size(); ++i) {
    if (i > 0) out.push_back(';');
    out += authors[i];
  }
  return out;
}

Publication parse_csv_record(const CsvRecord& record) {
  if (record.fields.size() != kCsvHeader.size()) {
    throw MalformedRecord(record.line,
                          "expected " + std::to_string(kCsvHeader.size()) +
                              " fields, found " +
                              std::to_string(record.fields.size()));
  }
  Publication pub;
  pub.id = record.fields[0];
  pub.title = record.fields[1];
  pub.abstract = record.fields[2];
  pub.pub_type = normalize_type(record.fields[3]);
  if (pub.id.empty()) throw MalformedRecord(record.line, "missing id");
  if (pub.title.empty()) throw MalformedRecord(record.line, "missing title");
  const std::string& year_field = record.fields[4];
  if (!year_field.empty()) {
    try {
      std::size_t consumed = 0;
      int year = std::stoi(year_field, &consumed);
      if (consumed != year_field.size()) throw std::invalid_argument(year_field);
      pub.year = year;
    } catch (const std::exception&) {
      throw MalformedRecord(record.line, "invalid year \"" + year_field + "\"");
    }
  }
  pub.authors = split_authors(record.fields[5]);
  return pub;
}

std::vector<Publication> read_csv_publications(const std::string& content) {
  auto records = read_csv(content);
  if (records.empty()) {
    throw MalformedRecord(1, "missing CSV header row");
  }
  if (records.front().fields != kCsvHeader) {
    throw MalformedRecord(records.front().line,
                          "header must be id,title,abstract,type,year,authors");
  }
  std::vector<Publication> pubs;
  pubs.reserve(records.size() - 1);
  for (std::size_t i = 1; i < records.size(); ++i) {
    pubs.push_back(parse_csv_record(records[i]));
  }
  return pubs;
}

std::vector<Publication> read_jsonl_publications(const std::string& content) {
  std::vector<Publication> pubs;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord(line_no, "JSON parse failure: " + std::string(e.what()));
    }
    Publication pub;
    try {
      pub.id = obj.value("id", std::string{});
      pub.title = obj.value("title", std::string{});
      pub.abstract = obj.value("abstract", std::string{});
      pub.pub_type = normalize_type(obj.value("type", std::string{}));
      if (obj.contains("year") && !obj.at("year").is_null()) {
        pub.year = obj.at("year").get<int>();
      }
      if (obj.contains("authors") && !obj.at("authors").is_null()) {
        pub.authors = obj.at("authors").get<std::vector<std::string>>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord(line_no, "bad field: " + std::string(e.what()));
    }
    if (pub.id.empty()) throw MalformedRecord(line_no, "missing id");
    if (pub.title.empty()) throw MalformedRecord(line_no, "missing title");
    pubs.push_back(std::move(pub));
  }
  return pubs;
}

}  // namespace

std::vector<Publication> read_publications(const std::filesystem::path& path,
                                           PubFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open publications file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string content = buffer.str();

  std::vector<Publication> pubs = format == PubFormat::Csv
                                      ? read_csv_publications(content)
                                      : read_jsonl_publications(content);

  std::unordered_set<std::string> ids;
  for (const Publication& pub : pubs) {
    if (!ids.insert(pub.id).second) {
      throw DuplicateId("duplicate publication id \"" + pub.id + "\"");
    }
  }
  return pubs;
}

void write_publications(const std::filesystem::path& path,
                        std::span<const Publication> pubs, PubFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open output file: " + path.string());
  }
  if (format == PubFormat::Csv) {
    out << "id,title,abstract,type,year,authors\n";
    for (const Publication& pub : pubs) {
      out << csv_escape(pub.id) << ',' << csv_escape(pub.title) << ','
          << csv_escape(pub.abstract) << ',' << csv_escape(pub.pub_type) << ','
          << (pub.year ? std::to_string(*pub.year) : std::string{}) << ','
          << csv_escape(join_authors(pub.authors)) << '\n';
    }
  } else {
    for (const Publication& pub : pubs) {
      nlohmann::ordered_json obj;
      obj["id"] = pub.id;
      obj["title"] = pub.title;
      obj["abstract"] = pub.abstract;
      obj["type"] = pub.pub_type;
      if (pub.year) obj["year"] = *pub.year;
      obj["authors"] = pub.authors;
      out << obj.dump() << '\n';
    }
  }
}

std::string publication_text(const Publication& pub) {
  if (pub.abstract.empty()) return pub.title;
  return pub.title + " " + pub.abstract;
}

TypeDistribution type_distribution(std::span<const Publication> pubs) {
  TypeDistribution dist;
  for (const Publication& pub : pubs) {
    ++dist.counts[pub.pub_type];
  }
  if (!pubs.empty()) {
    const double total = static_cast<double>(pubs.size());
    for (const auto& [type, count] : dist.counts) {
      dist.shares[type] = static_cast<double>(count) / total;
    }
  }
  return dist;
}

}  // namespace sdgmap
