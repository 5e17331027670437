#pragma once

#include <stdexcept>
#include <string>

namespace doismol {

// Bad input: geometry, grid, region or config values that violate a contract.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A quantity that cannot be fitted or normalized (all zeros, zero denominator).
class DegenerateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Time stepping produced a non-finite value or a singular system.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int time_level)
        : std::runtime_error(what + " (time level " + std::to_string(time_level) + ")"),
          time_level_(time_level)
    {
    }

    int time_level() const noexcept { return time_level_; }

private:
    int time_level_;
};

}  // namespace doismol
