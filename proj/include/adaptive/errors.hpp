#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace adaptive {

// Base for every error the engine raises. Callers that only care about
// "something in the engine rejected this" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input failed a range or shape check. `field` names the offending input when
// one can be identified (used by the HTTP layer for {code, message, field}).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message, std::string field = {})
      : Error(message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// A timestamped input arrived out of order.
class OrderingError : public Error {
 public:
  using Error::Error;
};

// Operation called outside its domain (empty pathway, empty log, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Catalog construction failed: cycle, dangling reference, duplicate id.
class CatalogError : public Error {
 public:
  using Error::Error;
};

// Simulation could not be set up (no eligible starting content, ...).
class SetupError : public Error {
 public:
  using Error::Error;
};

// Event log is corrupt; `sequence` is the first bad sequence number.
class IntegrityError : public Error {
 public:
  IntegrityError(const std::string& message, std::uint64_t sequence)
      : Error(message), sequence_(sequence) {}
  std::uint64_t sequence() const noexcept { return sequence_; }

 private:
  std::uint64_t sequence_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A report file does not have the expected shape.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ProviderError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

// Session exists but is no longer active.
class GoneError : public Error {
 public:
  using Error::Error;
};

}  // namespace adaptive
