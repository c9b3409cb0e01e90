#pragma once

#include <stdexcept>
#include <string>

namespace privflow {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TransportError : Error {
  using Error::Error;
};

struct AuthError : Error {
  using Error::Error;
};

struct CacheMissError : Error {
  using Error::Error;
};

struct BudgetExceeded : Error {
  using Error::Error;
};

struct SchemaError : Error {
  SchemaError(const std::string& file, const std::string& field, const std::string& what)
      : Error(file + ": field '" + field + "': " + what), file(file), field(field) {}
  std::string file;
  std::string field;
};

struct DuplicateId : Error {
  using Error::Error;
};

struct UnknownTemplate : Error {
  using Error::Error;
};

struct MissingBinding : Error {
  explicit MissingBinding(const std::string& name)
      : Error("unbound placeholder '" + name + "'"), name(name) {}
  std::string name;
};

struct InvalidVariant : Error {
  using Error::Error;
};

struct IncompleteTrace : Error {
  using Error::Error;
};

struct EmptyInput : Error {
  using Error::Error;
};

struct MissingArtifact : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace privflow
