#pragma once
#include <stdexcept>
#include <string>

namespace csplab {

// Malformed input: bad file syntax, invalid witness, violated precondition.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Work that would blow past a configured desk-scale cap.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace csplab
