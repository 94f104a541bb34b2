#pragma once

#include <stdexcept>

namespace wsfuse {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : Error { using Error::Error; };    // dimension mismatch
struct DomainError : Error { using Error::Error; };   // invalid value or index
struct NumericError : Error { using Error::Error; };  // NaN/Inf where finite required
struct StateError : Error { using Error::Error; };    // API misuse (backward before forward)
struct ConfigError : Error { using Error::Error; };   // bad hyperparameter or setup
struct ParseError : Error { using Error::Error; };    // CSV ingestion
struct FormatError : Error { using Error::Error; };   // checkpoint container

}  // namespace wsfuse
