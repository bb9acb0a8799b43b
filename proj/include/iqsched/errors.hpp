#pragma once

#include <stdexcept>
#include <string>

namespace iqsched {

// Misuse of an operation's contract (bad model, bad arguments, bad config).
// Scheduling outcomes that are legitimately "no plan exists" are reported via
// empty optionals instead, since infeasibility is a normal domain answer.
struct InvalidModelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InsufficientSamplesError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct TooManyTuplesError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnsupportedModelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CmaxTooSmallError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TooLargeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidPlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace iqsched
