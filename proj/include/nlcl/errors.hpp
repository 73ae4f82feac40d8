#pragma once

#include <stdexcept>
#include <string>

namespace nlcl {

/// Precondition or hypothesis violation detected before a run starts.
class ModelError : public std::invalid_argument {
public:
    explicit ModelError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numeric failure during time marching (invariant-region breach, non-finite state).
/// Carries the step index so a CFL or kernel misconfiguration can be located.
class NumericsError : public std::runtime_error {
public:
    NumericsError(const std::string& what, long step, long cell, double value)
        : std::runtime_error(what), step(step), cell(cell), value(value) {}
    long step;
    long cell;
    double value;
};

} // namespace nlcl
