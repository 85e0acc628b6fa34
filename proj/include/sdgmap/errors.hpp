#pragma once

#include <stdexcept>
#include <string>

namespace sdgmap {

/// Base class for all sdgmap errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// corpus
class MalformedCorpus : public Error {
 public:
  using Error::Error;
};
class InvalidCorpus : public Error {
 public:
  using Error::Error;
};
class UnknownGoal : public Error {
 public:
  using Error::Error;
};

// ingest
class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};
class DuplicateId : public Error {
 public:
  using Error::Error;
};

// embed
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};
class ZeroVector : public Error {
 public:
  using Error::Error;
};
class EmptyText : public Error {
 public:
  using Error::Error;
};
class TransportError : public Error {
 public:
  using Error::Error;
};
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// simtag
class MissingGoalVector : public Error {
 public:
  using Error::Error;
};
class UnknownPublication : public Error {
 public:
  using Error::Error;
};

// llmtag
class AuthError : public Error {
 public:
  using Error::Error;
};
class RetriesExhausted : public Error {
 public:
  using Error::Error;
};
class OutOfRange : public Error {
 public:
  using Error::Error;
};

// evaluate
class EmptyOverlap : public Error {
 public:
  using Error::Error;
};

// cli / configuration
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sdgmap
