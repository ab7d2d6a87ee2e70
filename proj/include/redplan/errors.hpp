#pragma once

#include <stdexcept>

namespace redplan {

// Thrown when a bounded search terminates without finding a feasible value
// (e.g. the block-count search hits its ceiling, or a utilization target
// yields fewer than one object).
class no_solution_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when a repair degree lies outside the valid range for the code.
class infeasible_degree_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace redplan
