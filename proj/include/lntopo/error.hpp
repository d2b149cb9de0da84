#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lntopo {

// Malformed graph input, e.g. an edge whose endpoint is not a known node.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An operation was asked for a value that is undefined on its input
// (empty graph, zero variance, unknown node, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Unparseable document. `offset` is a byte offset for JSON input and a
// 1-based line number for edge lists (see `is_line`).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset, bool is_line = false)
      : std::runtime_error(what), offset_(offset), is_line_(is_line) {}

  std::size_t offset() const noexcept { return offset_; }
  bool is_line() const noexcept { return is_line_; }

 private:
  std::size_t offset_;
  bool is_line_;
};

// A record is missing a required field or carries an unusable value.
class FieldError : public std::runtime_error {
 public:
  FieldError(const std::string& what, std::size_t record_index)
      : std::runtime_error(what), record_index_(record_index) {}

  std::size_t record_index() const noexcept { return record_index_; }

 private:
  std::size_t record_index_;
};

}  // namespace lntopo
