#ifndef RI_ERRORS_HPP
#define RI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ri {

// Bad input data: shape mismatches, nonpositive weights, schema violations.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

// An iterative solver hit its evaluation cap before reaching the requested
// tolerance.  Carries the best bounds found so far.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& msg, double best_upper, double best_lower)
        : std::runtime_error(msg), best_upper(best_upper), best_lower(best_lower) {}
    double best_upper;
    double best_lower;
};

// Limit estimation in classify() found no convergence trend.
class ClassificationError : public std::runtime_error {
public:
    ClassificationError(const std::string& msg, double estimate_a, double estimate_b)
        : std::runtime_error(msg), estimate_a(estimate_a), estimate_b(estimate_b) {}
    double estimate_a;
    double estimate_b;
};

// Brute-force oracles refuse instances above their cost guard.
class OracleScaleError : public std::invalid_argument {
public:
    explicit OracleScaleError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace ri

#endif
