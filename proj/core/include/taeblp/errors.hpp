#pragma once

#include <stdexcept>
#include <string>

namespace taeblp {

/// Invalid user-supplied configuration (rejected before any work starts).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numeric routine failed to converge or left its safe range.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An increment left the admissible band [-omega_max, omega_max].
class BandViolation : public std::runtime_error {
 public:
  BandViolation(int site, int value, double time, int layer = 0);

  int site() const noexcept { return site_; }
  int value() const noexcept { return value_; }
  double time() const noexcept { return time_; }
  int layer() const noexcept { return layer_; }

 private:
  int site_;
  int value_;
  double time_;
  int layer_;
};

/// Bookkeeping became inconsistent; always a bug, never a user error.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace taeblp
