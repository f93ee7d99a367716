#pragma once

#include <stdexcept>
#include <string>

namespace pfc {

inline constexpr const char* kVersion = "0.3.0";

/// Base class of every failure the library signals.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInterval : Error { using Error::Error; };
struct NonpositiveM : Error { using Error::Error; };
struct InvalidExponent : Error { using Error::Error; };
struct StepFailure : Error { using Error::Error; };
struct DomainEscape : Error { using Error::Error; };
struct OutOfSpan : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };
struct SingularFlow : Error { using Error::Error; };
struct UnknownFamily : Error { using Error::Error; };
struct PreconditionUnmet : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

/// Configuration rejection; `field` is the dotted path of the offending key.
struct ConfigError : Error {
  std::string field;
  ConfigError(std::string field_, const std::string& msg)
      : Error(field_ + ": " + msg), field(std::move(field_)) {}
};

}  // namespace pfc
