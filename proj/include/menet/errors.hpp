#pragma once

#include <stdexcept>
#include <string>

namespace menet {

// Error taxonomy mirrors the CLI exit codes: 2 missing/invalid input,
// 3 inconsistent manifest, 4 feature mismatch, 5 numerical abort.

struct input_error : std::runtime_error {
  explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct manifest_error : std::runtime_error {
  explicit manifest_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct feature_mismatch_error : std::runtime_error {
  explicit feature_mismatch_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace menet
