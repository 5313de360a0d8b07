#pragma once

#include <stdexcept>
#include <string>

namespace folab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite state or cocycle value met while iterating; message carries the step.
struct NumericOverflowError : Error {
    using Error::Error;
};

struct InvalidTraceError : Error {
    using Error::Error;
};

struct InvalidLiftError : Error {
    using Error::Error;
};

struct TuningFailureError : Error {
    using Error::Error;
};

/// A precondition certificate failed; message names the violated bound.
struct NotApplicableError : Error {
    using Error::Error;
};

struct InvalidSeedError : Error {
    using Error::Error;
};

/// Requested coordinates fall outside the generated Delone window.
struct WindowExceededError : Error {
    using Error::Error;
};

struct DisplacementSignError : Error {
    using Error::Error;
};

struct InvalidSystemError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace folab
