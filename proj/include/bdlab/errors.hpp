#pragma once

#include <stdexcept>
#include <string>

namespace bdlab {

// Exit-code contract: 2 config, 3 runtime/statistical, 4 I/O.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bdlab
