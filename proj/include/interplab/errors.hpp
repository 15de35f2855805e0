#pragma once

#include <stdexcept>
#include <string>

namespace interplab {

// Numerical failure surfaced by a linear solve: a pivot fell below the
// singularity threshold, so the matrix is treated as non-invertible.
class singular_matrix_error : public std::runtime_error {
public:
    explicit singular_matrix_error(const std::string& what) : std::runtime_error(what) {}
};

// The requested function space collapses to {0} for the given parameters
// (the cutoff min(1,1/t) fails to belong), so interpolation norms are
// meaningless there.
class trivial_space_error : public std::domain_error {
public:
    explicit trivial_space_error(const std::string& what) : std::domain_error(what) {}
};

// An iterative estimate stopped without meeting its convergence contract.
// The message carries the diagnostics (gap, iteration count).
class estimation_error : public std::runtime_error {
public:
    explicit estimation_error(const std::string& what) : std::runtime_error(what) {}
};

// A contour or grid was too narrow for the requested tolerance.
class contour_range_error : public std::runtime_error {
public:
    explicit contour_range_error(const std::string& what) : std::runtime_error(what) {}
};

}
