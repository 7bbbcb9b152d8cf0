#pragma once

#include <stdexcept>
#include <string>

namespace skolem {

// Exit-code-bearing error hierarchy. The CLI maps these to its exit codes;
// library users can catch them individually.

struct parse_error : std::runtime_error {
  std::size_t position;
  parse_error(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
        position(pos) {}
};

// A verdict could not be reached within the configured depth/precision caps.
struct undetermined_error : std::runtime_error {
  explicit undetermined_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct precondition_error : std::runtime_error {
  explicit precondition_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Resource caps and numeric range overflow (towers too tall for the
// requested evaluation point).
struct resource_error : std::runtime_error {
  explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Symbolic and numeric routes disagreed, or an internal invariant failed.
// Signals an engine bug, never a user error.
struct engine_fault : std::logic_error {
  explicit engine_fault(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace skolem
