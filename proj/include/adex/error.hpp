#pragma once

#include <stdexcept>
#include <string>

namespace adex {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input: bad header, unparseable token, unknown enum value.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Well-formed input violating a domain invariant (inverted interval,
/// non-monotonic timestamps, overlapping labels, ...).
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// Operation rejected up front (overlapping injection, invalid recipe).
class RejectionError : public Error {
public:
    using Error::Error;
};

/// Input too small or too flat for the requested computation.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// The operation is not defined for this input kind (e.g. predicting
/// with a weights-only explanation).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// An explainer found nothing that passes its own pruning thresholds.
class EmptyExplanationError : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Bad run configuration or CLI usage.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace adex
