// Shared aliases, error taxonomy, and small numeric helpers used across the
// jcsim library.  Header-only; everything lives in namespace jcsim.
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace jcsim {

using cxdbl = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cxdbl>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846264338327950288;

inline constexpr const char* version_string = "0.1.0";

// Error taxonomy.  The CLI maps these to process exit codes:
//   ConfigError -> 1, SolverError -> 2, StatisticsError -> 3.
// Library code throws; only the CLI layer translates to codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid user input: malformed config, contradictory or missing ratios,
// unknown keys, invalid spaces/tags/dimensions, unordered thresholds.
struct ConfigError : Error {
    using Error::Error;
};

// Numerical failure: linear solver breakdown, non-convergent series, ODE
// step-size underflow, SSE step overflow, domain poles hit at runtime.
struct SolverError : Error {
    using Error::Error;
};

// Insufficient or empty statistics pools (e.g. no matching episodes).
struct StatisticsError : Error {
    using Error::Error;
};

inline constexpr int exit_code_ok = 0;
inline constexpr int exit_code_config = 1;
inline constexpr int exit_code_solver = 2;
inline constexpr int exit_code_statistics = 3;

inline double sqr(double x) { return x * x; }

// Relative difference with an absolute floor, for tolerance checks.
inline double rel_diff(double a, double b, double floor_scale = 1.0) {
    const double scale = std::max({std::abs(a), std::abs(b), floor_scale * 1e-300});
    return std::abs(a - b) / scale;
}

}  // namespace jcsim
