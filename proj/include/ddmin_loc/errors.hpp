#pragma once

#include <stdexcept>
#include <string>

namespace ddmin_loc {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Data that violates a structural invariant (bad trace, bad element map).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A caller broke a function's documented precondition.
class ContractError : public Error {
public:
  using Error::Error;
};

/// Subject setup is unusable: missing binary, unreadable manifest, etc.
/// Aborts the whole session.
class ConfigurationError : public Error {
public:
  using Error::Error;
};

/// Raised by an oracle when a single execution could not be judged.
/// The delta debugger records the input as Unresolved and continues.
class ExecutionFault : public Error {
public:
  using Error::Error;
};

}  // namespace ddmin_loc
