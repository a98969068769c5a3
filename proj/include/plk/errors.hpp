#pragma once

#include <stdexcept>

namespace plk {

/// Input text that is not valid JSON (or not a number/rational where one is expected).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Well-formed JSON that does not match a plk/1 schema.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A registry name that no builtin answers to.
struct UnknownBuiltin : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace plk
