#pragma once

#include <stdexcept>
#include <string>

namespace percoflow {

// Bad user input: malformed JSON, inconsistent law parameters, invalid CLI
// arguments. Maps to exit code 2 in the CLI.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Geometric or mesh failure: empty discretization, degenerate cylinder,
// non-separating cut. Maps to exit code 3 in the CLI.
class GeometryError : public std::runtime_error {
 public:
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace percoflow
