#ifndef UIDTHAT_COMMON_ERRORS_H_
#define UIDTHAT_COMMON_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uidthat {

// Root of the library's exception hierarchy. The pipeline maps each subclass
// onto a distinct process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed bracketed tree. offset() is the byte position where parsing
// stopped.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or insufficient data handed to an operation.
class DataError : public Error {
 public:
  using Error::Error;
};

class ProviderError : public Error {
 public:
  ProviderError(const std::string& what, bool retryable)
      : Error(what), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

}  // namespace uidthat

#endif  // UIDTHAT_COMMON_ERRORS_H_
