#pragma once

#include <stdexcept>
#include <string>

namespace ispforge {

/// Invalid argument or violated precondition (bad dimensions, out-of-range
/// parameters, mismatched shapes).
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// File could not be read, parsed, or round-tripped.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Checkpoint or manifest is structurally valid but inconsistent with the
/// running configuration (e.g. tool registry hash mismatch).
class CompatibilityError : public std::runtime_error {
public:
    explicit CompatibilityError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ispforge
