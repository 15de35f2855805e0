#pragma once

// Dense complex matrix utilities on top of Eigen: the semigroup map
// (A, t) -> exp(-tA) by scaling and squaring of a truncated power series,
// resolvent solves through partially pivoted LU with an explicit
// singularity threshold, and eigenvalue helpers used by the spectral
// oracles.  Everything here is small-dimension (d <= 8) plumbing.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "interplab/errors.hpp"

namespace interplab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline double inf_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

// exp(M) by scaling and squaring: bring ||M|| below 1/2, sum the power
// series far past double precision, square back up.
inline Matrix matrix_exponential(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("matrix_exponential: square matrix required");
    const double norm = inf_norm(m);
    if (!std::isfinite(norm)) throw std::invalid_argument("matrix_exponential: non-finite entries");
    int squarings = 0;
    double scaled = norm;
    while (scaled > 0.5 && squarings < 80) {
        scaled *= 0.5;
        ++squarings;
    }
    const Matrix s = m / std::pow(2.0, squarings);
    const auto d = m.rows();
    Matrix acc = Matrix::Identity(d, d);
    Matrix term = Matrix::Identity(d, d);
    for (int k = 1; k <= 24; ++k) {  // 0.5^25/25! is far below eps
        term = (term * s) / static_cast<double>(k);
        acc += term;
    }
    for (int k = 0; k < squarings; ++k) {
        acc = acc * acc;
        if (!acc.allFinite())
            throw std::domain_error("matrix_exponential: overflow while squaring (growth too fast)");
    }
    return acc;
}

// Semigroup at time t for the generator -A.
inline Matrix semigroup_matrix(const Matrix& a, double t) {
    if (t < 0.0) throw std::invalid_argument("semigroup_matrix: t must be nonnegative");
    if (t == 0.0) return Matrix::Identity(a.rows(), a.cols());
    return matrix_exponential((-t) * a);
}

// Solve M x = rhs by partial-pivot LU; a pivot below 1e-13*||M|| means M is
// treated as singular.
inline Matrix solve_checked(const Matrix& m, const Matrix& rhs) {
    if (m.rows() != m.cols()) throw std::invalid_argument("solve_checked: square matrix required");
    Eigen::PartialPivLU<Matrix> lu(m);
    const double floor = 1e-13 * std::max(inf_norm(m), 1e-300);
    const auto diag = lu.matrixLU().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i)
        if (std::abs(diag[i]) < floor)
            throw singular_matrix_error("solve_checked: pivot " + std::to_string(std::abs(diag[i])) +
                                        " below threshold " + std::to_string(floor));
    return lu.solve(rhs);
}

inline Vector solve_checked(const Matrix& m, const Vector& rhs) {
    Matrix r = solve_checked(m, Matrix(rhs));
    return Vector(r.col(0));
}

// (zI - A)^{-1}.
inline Matrix solve_resolvent(const Matrix& a, Complex z) {
    Matrix m = -a;
    m.diagonal().array() += z;
    return solve_checked(m, Matrix(Matrix::Identity(a.rows(), a.cols())));
}

inline std::vector<Complex> eigenvalues_of(const Matrix& a) {
    Eigen::ComplexEigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw estimation_error("eigenvalues_of: eigensolver failed");
    std::vector<Complex> out(static_cast<std::size_t>(a.rows()));
    for (Eigen::Index i = 0; i < a.rows(); ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    return out;
}

struct EigenDecomposition {
    Matrix vectors;
    Vector values;
    double condition;  // condition number of the eigenvector basis
};

inline EigenDecomposition eigen_decomposition(const Matrix& a) {
    Eigen::ComplexEigenSolver<Matrix> es(a, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success) throw estimation_error("eigen_decomposition: eigensolver failed");
    EigenDecomposition d;
    d.vectors = es.eigenvectors();
    d.values = es.eigenvalues();
    Eigen::JacobiSVD<Matrix> svd(d.vectors);
    const double smin = svd.singularValues().minCoeff();
    d.condition = smin > 0.0 ? svd.singularValues().maxCoeff() / smin : std::numeric_limits<double>::infinity();
    return d;
}

// Operator 2-norm (largest singular value); fine at these dimensions.
inline double operator_norm(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().maxCoeff();
}

}
