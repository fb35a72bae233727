#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace testgen {

/// A caller broke a documented precondition (shape mismatch, invalid index,
/// empty dataset, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Not enough unexecuted inputs remain to satisfy a sampling request.
class ExhaustionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The synthetic SUT cannot be calibrated to the requested positive density.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration. `field()` is a JSON-style path such as
/// `algorithms[1].treducer`.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Filesystem or process failure; `path()` names the file involved.
class IoError : public std::runtime_error {
 public:
  IoError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

namespace detail {

inline void require(bool condition, std::string_view message) {
  if (!condition) throw ContractViolation(std::string(message));
}

}  // namespace detail
}  // namespace testgen
