#pragma once

#include <stdexcept>
#include <string>

namespace ppsynth {

// Raised when privacy calibration cannot meet the requested budget.
// The message names the limiting term so callers can report it verbatim.
class CalibrationError : public std::runtime_error {
 public:
  explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

// Raised for numerical failures (non-PSD matrices, degenerate systems, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an input file or stream cannot be parsed.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ppsynth
