#pragma once

#include <stdexcept>
#include <string>

namespace dbar {

/// Bad input: malformed expressions, invalid curve data, out-of-range flags.
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical procedure failed to converge or produced non-finite values.
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dbar
