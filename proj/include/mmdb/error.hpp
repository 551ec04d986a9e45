#pragma once

#include <stdexcept>
#include <string>

namespace mmdb {

// Failure taxonomy shared by every module. Messages are complete sentences
// without trailing newline; the CLI prefixes them with "error: ".
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad engine or encoder configuration (dimension too small, missing model).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller violated a function precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A table definition failed validation.
class InvalidDef : public Error {
 public:
  using Error::Error;
};

// Lookup of a registered object (collection, table, link, index) failed.
class NotFound : public Error {
 public:
  using Error::Error;
};

// An operation needs trained heads but none are loaded.
class ModelNotReady : public Error {
 public:
  using Error::Error;
};

// Training data is unusable (missing span labels, empty corpus).
class InvalidCorpus : public Error {
 public:
  using Error::Error;
};

// A persisted index or view no longer matches the live model or collection.
class StaleArtifact : public Error {
 public:
  using Error::Error;
};

// File system or serialization failure. Messages carry the path and, for
// line-oriented formats, the 1-based line number.
class IoError : public Error {
 public:
  using Error::Error;
};

// SQL text could not be parsed. Carries the 1-based line and column of the
// offending token.
class ParseError : public Error {
 public:
  ParseError(int line, int col, const std::string& detail)
      : Error("syntax error at " + std::to_string(line) + ":" +
              std::to_string(col) + ": " + detail),
        line_(line),
        col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

// A parsed statement cannot be turned into an executable plan.
class PlanError : public Error {
 public:
  using Error::Error;
};

// Filtering on a text-derived column requires a secondary index unless the
// session explicitly allows falling back to a full scan.
class IndexRequired : public PlanError {
 public:
  using PlanError::PlanError;
};

}  // namespace mmdb
