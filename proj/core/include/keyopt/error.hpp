#pragma once

#include <stdexcept>
#include <string>

namespace keyopt {

/// Raised for invalid inputs and violated contracts anywhere in the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nothing typeable survived ingestion.
class EmptyCorpusError : public Error {
 public:
  EmptyCorpusError() : Error("empty corpus") {}
  explicit EmptyCorpusError(const std::string& detail)
      : Error("empty corpus: " + detail) {}
};

}  // namespace keyopt
