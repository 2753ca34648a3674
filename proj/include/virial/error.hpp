#pragma once

#include <stdexcept>
#include <string>

namespace virial {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// A size limit (enumeration cap, symbolic cap, quadrature cost cap) was exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "cap_exceeded"; }
};

/// Arguments outside the operation's domain.
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain_error"; }
};

/// Malformed configuration; `key()` names the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }
  const char* kind() const noexcept override { return "config_error"; }

 private:
  std::string key_;
};

}  // namespace virial
