#pragma once

#include <stdexcept>
#include <string>

namespace dsbr {

// Bad inputs: malformed games, invalid distributions, out-of-range parameters.
struct ValidationError : std::invalid_argument {
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// The computation itself failed: solver stall, iteration cap, broken runtime invariant.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A policy-induced chain is reducible or periodic where ergodicity is required.
struct NotErgodicError : ValidationError {
    explicit NotErgodicError(const std::string& what) : ValidationError(what) {}
};

// A stepsize sequence stepped outside the admissible range mid-run.
struct ScheduleError : ValidationError {
    explicit ScheduleError(const std::string& what) : ValidationError(what) {}
};

}  // namespace dsbr
