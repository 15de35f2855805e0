#pragma once

// Parabolic model problem u' + Au = f on (0, T].  The right-hand side is
// piecewise constant on the grid cells (and zero below the grid), so the
// variation-of-constants formula steps node to node exactly: across each
// half-cell, u <- exp(-LA) u + J(L) f with J(L) = int_0^L exp(-sA) ds,
// both blocks of one augmented exponential.  On top of the solver sit the
// regularity seminorms of u' and Au, the empirical maximal regularity
// constant, the orbit/forced splitting, and a probe showing what fails
// when the initial value lies outside the interpolation space.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "interplab/hardy.hpp"
#include "interplab/sectorial.hpp"

namespace interplab {

struct CauchyProblem {
    SectorialOperator op;
    VectorSampledFunction f;
    Vector x0;
};

struct CauchySolution {
    VectorSampledFunction u, du;
    double residual = 0.0;  // worst relative defect of du + Au - f at nodes
    bool cross_route = false;  // du recomputed through A^{-1} rather than copied
};

namespace detail {

// exp(-tau A) and J(tau) = int_0^tau exp(-sA) ds from one augmented
// exponential; J stays valid for singular A.
struct StepMatrices {
    Matrix propagator, integral;
};

inline StepMatrices step_matrices(const Matrix& a, double tau) {
    const Eigen::Index d = a.rows();
    Matrix aug = Matrix::Zero(2 * d, 2 * d);
    aug.topLeftCorner(d, d) = -tau * a;
    aug.topRightCorner(d, d) = tau * Matrix::Identity(d, d);
    const Matrix e = matrix_exponential(aug);
    return {e.topLeftCorner(d, d), e.topRightCorner(d, d)};
}

}  // namespace detail

inline CauchySolution solve_cauchy(const CauchyProblem& pb) {
    const Matrix& a = pb.op.A;
    const LogGrid& g = pb.f.grid();
    const Eigen::Index d = a.rows();
    if (pb.f.dim() != d || pb.x0.size() != d)
        throw std::invalid_argument("solve_cauchy: dimension mismatch");
    const std::size_t n = g.size();

    std::vector<Vector> u(n);
    u[0] = semigroup_matrix(a, g.t_min()) * pb.x0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double mid = g.cell_right(i);
        const auto first = detail::step_matrices(a, mid - g.node(i));
        const auto second = detail::step_matrices(a, g.node(i + 1) - mid);
        const Vector at_mid = first.propagator * u[i] + first.integral * pb.f.value(i);
        u[i + 1] = second.propagator * at_mid + second.integral * pb.f.value(i + 1);
    }

    const bool cross = pb.op.invertible;
    std::vector<Vector> du(n);
    double defect = 0.0, scale = 1e-300;
    for (std::size_t i = 0; i < n; ++i) {
        const Vector au = a * u[i];
        du[i] = cross ? Vector(a * Vector(solve_checked(a, pb.f.value(i)) - u[i]))
                      : Vector(pb.f.value(i) - au);
        defect = std::max(defect, (du[i] + au - pb.f.value(i)).norm());
        scale = std::max(scale, pb.f.value(i).norm() + au.norm());
    }
    return {VectorSampledFunction(g, std::move(u)), VectorSampledFunction(g, std::move(du)),
            defect / scale, cross};
}

struct MRSeminorms {
    NormValue du_norm, au_norm, f_norm;
    bool lorentz_grid_only = false;  // no off-grid continuation for Lorentz bases
};

namespace detail {

inline SampledFunction truncate_after(const SampledFunction& s, double T) {
    std::vector<double> v(s.values());
    for (std::size_t i = 0; i < v.size(); ++i)
        if (s.grid().node(i) > T) v[i] = 0.0;
    return SampledFunction(s.grid(), std::move(v));
}

}  // namespace detail

// Phi-norms of |u'|, |Au| and |f| on (0, T].  Lebesgue bases extend the
// grid sum by the fitted head mass below the grid; the tail is not
// continued since everything vanishes beyond T.  Lorentz bases are
// reported from the grid alone.
inline MRSeminorms mr_seminorms(const SectorialOperator& op, const PhiSpace& phi,
                                const CauchySolution& sol, const VectorSampledFunction& f,
                                double T) {
    MRSeminorms out;
    auto measure = [&](const SampledFunction& s) {
        const SampledFunction cut = detail::truncate_after(s, T);
        if (phi.base.kind == RiSpace::Kind::Lebesgue)
            return extended_lp_norm(phi, cut, true, false);
        return phi_norm(phi, cut);
    };
    out.lorentz_grid_only = phi.base.kind != RiSpace::Kind::Lebesgue;
    out.du_norm = measure(sol.du.euclidean_norms());
    out.au_norm = measure(sol.u.reduce([&](const Vector& v) { return (op.A * v).norm(); }));
    out.f_norm = measure(f.euclidean_norms());
    return out;
}

struct MRReport {
    MRSeminorms seminorms;
    double x0_interp_norm = 0.0;
    double residual = 0.0;
    double ratio = 0.0;  // (|u'| + |Au|) / (|f| + |x0|_interp)
};

inline MRReport mr_report(const CauchyProblem& pb, const PhiSpace& phi, double T) {
    const CauchySolution sol = solve_cauchy(pb);
    MRReport rep;
    rep.seminorms = mr_seminorms(pb.op, phi, sol, pb.f, T);
    rep.residual = sol.residual;
    if (pb.x0.norm() > 0.0)
        rep.x0_interp_norm = k_method_norm(Couple{DomainCouple{pb.op.A}}, phi, pb.x0, pb.f.grid());
    const double denom = rep.seminorms.f_norm.value + rep.x0_interp_norm;
    if (!(denom > 0.0)) throw estimation_error("mr_report: zero data, ratio undefined");
    rep.ratio = (rep.seminorms.du_norm.value + rep.seminorms.au_norm.value) / denom;
    return rep;
}

// sup of the regularity ratio over a family of problems.
inline double mr_constant_estimate(const SectorialOperator& op, const PhiSpace& phi,
                                   const std::vector<std::pair<VectorSampledFunction, Vector>>& data,
                                   double T) {
    if (data.empty()) throw std::invalid_argument("mr_constant_estimate: empty problem family");
    double sup = 0.0;
    for (const auto& [f, x0] : data)
        sup = std::max(sup, mr_report(CauchyProblem{op, f, x0}, phi, T).ratio);
    return sup;
}

struct SplitSolution {
    CauchySolution direct;
    VectorSampledFunction orbit, forced, combined;
    double mismatch = 0.0;  // max node difference |orbit + forced - direct|, relative
};

// Linearity check: the free orbit from x0 plus the zero-initial forced
// solution, both through the same recurrence, against the direct solve.
inline SplitSolution split_solve(const CauchyProblem& pb) {
    SplitSolution out{solve_cauchy(pb),
                      solve_cauchy({pb.op, VectorSampledFunction::zero(pb.f.grid(), pb.f.dim()),
                                    pb.x0})
                          .u,
                      solve_cauchy({pb.op, pb.f, Vector(Vector::Zero(pb.x0.size()))}).u,
                      VectorSampledFunction::zero(pb.f.grid(), pb.f.dim()), 0.0};
    out.combined = out.orbit.plus(out.forced);
    double scale = 1e-300;
    for (std::size_t i = 0; i < out.direct.u.size(); ++i)
        scale = std::max(scale, out.direct.u.value(i).norm());
    out.mismatch = out.combined.max_difference(out.direct.u) / scale;
    return out;
}

struct NecessityProbe {
    bool x0_outside = false;  // interpolation norm of x0 infinite or undecidable
    std::string note;
    // (grid head t_min, grid seminorm of u') as the grid extends downward;
    // unbounded growth is the failure signature
    std::vector<std::pair<double, double>> head_growth;
};

inline NecessityProbe necessity_probe(const SectorialOperator& op, const PhiSpace& phi,
                                      const Vector& x0, const LogGrid& grid, int rounds = 3) {
    if (!(x0.norm() > 0.0)) throw std::invalid_argument("necessity_probe: need x0 != 0");
    NecessityProbe out;
    try {
        k_method_norm(Couple{DomainCouple{op.A}}, phi, x0, grid);
        out.note = "x0 has a finite interpolation norm";
    } catch (const trivial_space_error& e) {
        out.x0_outside = true;
        out.note = e.what();
    } catch (const estimation_error& e) {
        out.x0_outside = true;
        out.note = e.what();
    }
    for (int k = 0; k < rounds; ++k) {
        const LogGrid gk = grid.padded(2.0 * k, 0.0);
        const CauchyProblem pb{op, VectorSampledFunction::zero(gk, x0.size()), x0};
        const CauchySolution sol = solve_cauchy(pb);
        out.head_growth.emplace_back(gk.t_min(), phi_norm(phi, sol.du.euclidean_norms()).value);
    }
    return out;
}

}
