#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace caring {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input text (bad JSON, missing fields, wrong types).
struct ParseError : Error {
  using Error::Error;
};

/// Well-formed input that violates a domain invariant. `field` is a
/// dotted/indexed path such as "frames[3][1]" when one is known.
struct ValidationError : Error {
  ValidationError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field(std::move(field)) {}
  explicit ValidationError(const std::string& what) : ValidationError("", what) {}

  std::string field;
};

struct IoError : Error {
  using Error::Error;
};

struct NotFoundError : Error {
  using Error::Error;
};

/// Operation is valid in general but not in the current state, e.g.
/// generating while steps are still drafts. `ids` names the offenders.
struct ConflictError : Error {
  ConflictError(const std::string& what, std::vector<std::string> ids)
      : Error(what), ids(std::move(ids)) {}

  std::vector<std::string> ids;
};

}  // namespace caring
