#pragma once

#include <stdexcept>
#include <string>

namespace claimwise {

/// Bad arguments or violated input contracts (CLI exit code 1).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent data files and records (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model-backed capability failures (CLI exit code 3).
class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Transport failed after the retry budget, or a replay transcript has no entry.
class ProviderUnavailable : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

/// The completion parsed to nothing usable (e.g. no "Claim:" lines).
class EmptyResult : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

/// The judge completion contained no number in [0, 1].
class JudgeParseError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

}  // namespace claimwise

namespace claimwise {

/// A remote call failed at the transport level; safe to retry.
class TransportError : public ProviderUnavailable {
 public:
  using ProviderUnavailable::ProviderUnavailable;
};

}  // namespace claimwise
