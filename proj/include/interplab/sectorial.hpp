#pragma once

// Holomorphic calculus for sectorial matrices.  Functions with two-sided
// power decay are integrated against the resolvent along a sector-boundary
// contour; the extended class adds a resolvent term and a constant; bounded
// holomorphic functions go through the regularization
//   f(A) = A^{-1} (I+A)^2 (f e)(A),  e(z) = z/(1+z)^2.
// Kernel transforms psi(tA) are applied algebraically (matrix exponential
// and shifted solves), and the scale-family seminorms they induce are
// Phi-norms of t -> |psi(tA)x| / t.

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "interplab/couples.hpp"
#include "interplab/errors.hpp"
#include "interplab/grid.hpp"
#include "interplab/matrix.hpp"
#include "interplab/spaces.hpp"
#include "interplab/vector_function.hpp"

namespace interplab {

struct SectorialOperator {
    Matrix A;
    bool invertible = true;
    double angle_estimate = 0.0;  // max |arg lambda| over nonzero eigenvalues
    double spectral_scale = 1.0;  // geometric mean of nonzero |lambda|

    Eigen::Index dim() const { return A.rows(); }

    static SectorialOperator from_matrix(const Matrix& a) {
        if (a.rows() != a.cols() || a.rows() == 0)
            throw std::invalid_argument("SectorialOperator: need a nonempty square matrix");
        SectorialOperator op;
        op.A = a;
        const std::vector<Complex> evs = eigenvalues_of(a);
        double max_abs = 0.0;
        for (const Complex& l : evs) max_abs = std::max(max_abs, std::abs(l));
        double log_sum = 0.0;
        int nonzero = 0;
        for (const Complex& l : evs) {
            if (std::abs(l) <= 1e-14 * std::max(max_abs, 1.0)) {
                op.invertible = false;
                continue;
            }
            const double arg = std::abs(std::arg(l));
            if (arg >= std::numbers::pi - 1e-12)
                throw std::invalid_argument(
                    "SectorialOperator: eigenvalue on the negative real axis");
            op.angle_estimate = std::max(op.angle_estimate, arg);
            log_sum += std::log(std::abs(l));
            ++nonzero;
        }
        op.spectral_scale = nonzero > 0 ? std::exp(log_sum / nonzero) : 1.0;
        return op;
    }
};

// sup over r of ||lambda R(lambda, A)|| along the two rays at +-angle.
inline double sector_profile(const SectorialOperator& op, double angle, int per_decade = 8) {
    if (!(angle > op.angle_estimate))
        throw std::invalid_argument("sector_profile: angle must exceed the spectral angle");
    const double rho = op.spectral_scale;
    double bound = 0.0;
    const int decades = 16;
    const int n = decades * per_decade + 1;
    for (int i = 0; i < n; ++i) {
        const double r = rho * std::pow(10.0, -8.0 + 16.0 * i / (n - 1));
        for (double sgn : {1.0, -1.0}) {
            const Complex z = r * std::exp(Complex(0.0, sgn * angle));
            bound = std::max(bound, std::abs(z) * operator_norm(solve_resolvent(op.A, z)));
        }
    }
    return bound;
}

// |f(z)| <= bound * min(|z|^decay, |z|^-decay) on the working sector.
struct H0Function {
    std::function<Complex(Complex)> eval;
    double decay = 1.0;
    double bound = 1.0;
};

struct Contour {
    double angle = 0.0;  // ray angle beta, strictly between spectrum and working sector
    double r_min = 0.0, r_max = 0.0;
    int points_per_decade = 40;

    // Midway ray angle; radial range wide enough that power-decay tails
    // beyond it are negligible at double precision.
    static Contour auto_for(const SectorialOperator& op, double working_angle,
                            int per_decade = 40) {
        if (!(working_angle > op.angle_estimate) || !(working_angle < std::numbers::pi))
            throw std::invalid_argument("Contour::auto_for: working angle must lie strictly "
                                        "between the spectral angle and pi");
        Contour c;
        c.angle = 0.5 * (op.angle_estimate + working_angle);
        c.r_min = 1e-10 * op.spectral_scale;
        c.r_max = 1e10 * op.spectral_scale;
        c.points_per_decade = per_decade;
        return c;
    }
};

// (1/2 pi i) int_Gamma f(z) R(z,A) dz with Gamma the sector boundary at
// the contour angle, traversed downward along the upper ray and outward
// along the lower one.  Log-radius trapezoid quadrature; the reported
// truncation bound uses ||R(z,A)|| <= M/|z| on the rays.
inline Matrix calc_h0(const SectorialOperator& op, const H0Function& f, const Contour& contour,
                      double tolerance = 1e-7) {
    if (!(contour.angle > op.angle_estimate))
        throw std::invalid_argument("calc_h0: contour angle must exceed the spectral angle");
    if (!(contour.r_min > 0.0) || !(contour.r_max > contour.r_min))
        throw std::invalid_argument("calc_h0: bad radial range");

    const double m_bound = sector_profile(op, contour.angle);
    const double s = f.decay;
    const double truncated = (f.bound * m_bound / (std::numbers::pi * s)) *
                             (std::pow(contour.r_min, s) + std::pow(contour.r_max, -s));
    if (!(truncated <= tolerance)) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "calc_h0: truncation bound %.3e exceeds tolerance %.3e; widen the radial range",
                      truncated, tolerance);
        throw contour_range_error(msg);
    }

    const double lo = std::log(contour.r_min), hi = std::log(contour.r_max);
    const int n = std::max(2, static_cast<int>(std::lround((hi - lo) / std::numbers::ln10 *
                                                           contour.points_per_decade))) + 1;
    const double h = (hi - lo) / (n - 1);
    const Complex up = std::exp(Complex(0.0, contour.angle));
    const Complex down = std::exp(Complex(0.0, -contour.angle));
    Matrix acc = Matrix::Zero(op.dim(), op.dim());
    for (int i = 0; i < n; ++i) {
        const double r = std::exp(lo + i * h);
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        const Complex z_lower = r * down, z_upper = r * up;
        acc += (w * f.eval(z_lower) * z_lower) * solve_resolvent(op.A, z_lower);
        acc -= (w * f.eval(z_upper) * z_upper) * solve_resolvent(op.A, z_upper);
    }
    return acc * (h / Complex(0.0, 2.0 * std::numbers::pi));
}

// f = f0 + c/(1+z) + d with f0 in the decay class.
struct EClassFunction {
    H0Function h0;
    Complex resolvent_coeff = 0.0;
    Complex constant = 0.0;
};

inline Matrix calc_e(const SectorialOperator& op, const EClassFunction& f, const Contour& contour,
                     double tolerance = 1e-7) {
    Matrix out = calc_h0(op, f.h0, contour, tolerance);
    const Matrix id = Matrix::Identity(op.dim(), op.dim());
    if (f.resolvent_coeff != Complex(0.0))
        out += f.resolvent_coeff * solve_checked(Matrix(id + op.A), id);
    if (f.constant != Complex(0.0)) out += f.constant * id;
    return out;
}

struct HInfFunction {
    std::function<Complex(Complex)> eval;
    double sup_bound = 1.0;  // sup |f| on the working sector
};

// Regularized calculus for bounded f; needs 0 outside the spectrum.
inline Matrix calc_hinf(const SectorialOperator& op, const HInfFunction& f, const Contour& contour,
                        double tolerance = 1e-7) {
    if (!op.invertible)
        throw std::invalid_argument("calc_hinf: regularization needs an invertible matrix");
    // |z|/|1+z|^2 <= min(|z|, 1/|z|) / sin^2(angle gap to -1)
    const double gap = std::sin(0.5 * (std::numbers::pi - contour.angle));
    H0Function g{[&f](Complex z) { return f.eval(z) * z / ((1.0 + z) * (1.0 + z)); }, 1.0,
                 f.sup_bound / (gap * gap)};
    const Matrix core = calc_h0(op, g, contour, tolerance);
    const Matrix id = Matrix::Identity(op.dim(), op.dim());
    const Matrix shift = id + op.A;
    return solve_checked(op.A, Matrix(shift * shift * core));
}

// ---- kernel transforms psi(tA) ----

enum class PsiKernel { ExpDecay, Moebius1, Moebius2 };

inline std::string psi_label(PsiKernel k) {
    switch (k) {
        case PsiKernel::ExpDecay: return "z*exp(-z)";
        case PsiKernel::Moebius1: return "z/(1+z)";
        default: return "z/(1+z)^2";
    }
}

inline Matrix psi_matrix(const SectorialOperator& op, PsiKernel kernel, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("psi_matrix: need t > 0");
    const Matrix id = Matrix::Identity(op.dim(), op.dim());
    const Matrix ta = t * op.A;
    switch (kernel) {
        case PsiKernel::ExpDecay: return ta * matrix_exponential(Matrix(-ta));
        case PsiKernel::Moebius1: return id - solve_checked(Matrix(id + ta), id);
        default: {
            const Matrix inv = solve_checked(Matrix(id + ta), id);
            return ta * inv * inv;
        }
    }
}

inline Vector apply_psi(const SectorialOperator& op, PsiKernel kernel, double t, const Vector& x) {
    return psi_matrix(op, kernel, t) * x;
}

// ---- scale-family representation norms ----

namespace detail {

inline void require_half_plane(const SectorialOperator& op, const char* who) {
    if (!(op.angle_estimate < std::numbers::pi / 2.0))
        throw std::invalid_argument(std::string(who) +
                                    ": needs spectral angle below pi/2 for decay at infinity");
}

}  // namespace detail

inline NormValue psi_rep_norm(const PhiSpace& phi, const SectorialOperator& op, PsiKernel kernel,
                              const Vector& x, bool include_base, const LogGrid& grid,
                              double pad_decades = 6.0) {
    if (kernel == PsiKernel::ExpDecay) detail::require_half_plane(op, "psi_rep_norm");
    const LogGrid pg = grid.padded(pad_decades, pad_decades);
    std::vector<double> vals(pg.size());
    for (std::size_t i = 0; i < pg.size(); ++i) {
        const double t = pg.node(i);
        vals[i] = (psi_matrix(op, kernel, t) * x).norm() / t;
    }
    NormValue nv = phi_norm(phi, SampledFunction(pg, std::move(vals)));
    if (include_base) nv.value += x.norm();
    return nv;
}

inline NormValue semigroup_rep_norm(const PhiSpace& phi, const SectorialOperator& op,
                                    const Vector& x, bool include_base, const LogGrid& grid,
                                    double pad_decades = 6.0) {
    detail::require_half_plane(op, "semigroup_rep_norm");
    const LogGrid pg = grid.padded(pad_decades, pad_decades);
    std::vector<double> vals(pg.size());
    for (std::size_t i = 0; i < pg.size(); ++i) {
        const double t = pg.node(i);
        vals[i] = (semigroup_matrix(op.A, t) * x - x).norm() / t;
    }
    NormValue nv = phi_norm(phi, SampledFunction(pg, std::move(vals)));
    if (include_base) nv.value += x.norm();
    return nv;
}

// ---- cross-method norm comparison ----

struct InterpNormReport {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> norms;  // norms[m][j]: method m on xs[j]
    double c_emp = 0.0;                      // worst spread max_m / min_m over xs
    std::size_t worst_x = 0;
};

inline InterpNormReport interp_norm_report(const SectorialOperator& op, const PhiSpace& phi,
                                           const std::vector<Vector>& xs, const LogGrid& grid) {
    if (xs.empty()) throw std::invalid_argument("interp_norm_report: empty vector list");
    InterpNormReport rep;
    const Couple couple{DomainCouple{op.A}};
    std::vector<std::function<double(const Vector&)>> methods;
    rep.labels.push_back("k-method");
    methods.push_back([&](const Vector& x) { return k_method_norm(couple, phi, x, grid); });
    rep.labels.push_back("trace");
    methods.push_back([&](const Vector& x) { return trace_method_norm(couple, phi, x, grid); });
    for (PsiKernel k : {PsiKernel::ExpDecay, PsiKernel::Moebius1, PsiKernel::Moebius2}) {
        rep.labels.push_back("psi " + psi_label(k));
        methods.push_back(
            [&, k](const Vector& x) { return psi_rep_norm(phi, op, k, x, true, grid).value; });
    }
    rep.labels.push_back("semigroup");
    methods.push_back(
        [&](const Vector& x) { return semigroup_rep_norm(phi, op, x, true, grid).value; });

    rep.norms.assign(methods.size(), std::vector<double>(xs.size()));
    for (std::size_t m = 0; m < methods.size(); ++m)
        for (std::size_t j = 0; j < xs.size(); ++j) rep.norms[m][j] = methods[m](xs[j]);
    for (std::size_t j = 0; j < xs.size(); ++j) {
        double lo = rep.norms[0][j], hi = rep.norms[0][j];
        for (std::size_t m = 1; m < methods.size(); ++m) {
            lo = std::min(lo, rep.norms[m][j]);
            hi = std::max(hi, rep.norms[m][j]);
        }
        if (!(lo > 0.0)) throw estimation_error("interp_norm_report: nonpositive norm met");
        if (hi / lo > rep.c_emp) {
            rep.c_emp = hi / lo;
            rep.worst_x = j;
        }
    }
    return rep;
}

// ---- uniform boundedness of the calculus on the interpolation space ----

struct DoreMember {
    std::string label;
    double param = 0.0;
    double sup_bound = 1.0;
    double max_ratio = 0.0;     // max over xs of |f(A)x| / (sup bound * |x|), interp norms
    double median_ratio = 0.0;  // median over xs
};

struct DoreReport {
    std::vector<DoreMember> members;
    double sup_ratio = 0.0;
};

struct DoreFamilyEntry {
    std::string label;
    double param = 0.0;
    HInfFunction f;
};

inline std::vector<DoreFamilyEntry> dore_default_family(double working_angle) {
    std::vector<DoreFamilyEntry> fam;
    for (int k = 1; k <= 8; ++k) {
        fam.push_back({"moebius^" + std::to_string(k), static_cast<double>(k),
                       HInfFunction{[k](Complex z) {
                                        return std::pow((z - 1.0) / (z + 1.0), k);
                                    },
                                    1.0}});
    }
    for (double tau : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
        fam.push_back({"z^(i " + std::to_string(tau) + ")", tau,
                       HInfFunction{[tau](Complex z) {
                                        return std::exp(Complex(0.0, tau) * std::log(z));
                                    },
                                    std::exp(std::abs(tau) * working_angle)}});
    }
    return fam;
}

inline DoreReport dore_ratio(const SectorialOperator& op, const PhiSpace& phi,
                             const std::vector<DoreFamilyEntry>& family,
                             const std::vector<Vector>& xs, const LogGrid& grid,
                             double working_angle) {
    if (family.empty() || xs.empty())
        throw std::invalid_argument("dore_ratio: empty family or vector list");
    const Couple couple{DomainCouple{op.A}};
    const Contour contour = Contour::auto_for(op, working_angle);
    DoreReport rep;
    std::vector<double> base(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        base[j] = k_method_norm(couple, phi, xs[j], grid);
        if (!(base[j] > 0.0)) throw estimation_error("dore_ratio: zero base norm");
    }
    for (const auto& [label, param, f] : family) {
        const Matrix fa = calc_hinf(op, f, contour);
        DoreMember member;
        member.label = label;
        member.param = param;
        member.sup_bound = f.sup_bound;
        std::vector<double> ratios(xs.size());
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const double num = k_method_norm(couple, phi, Vector(fa * xs[j]), grid);
            ratios[j] = num / (f.sup_bound * base[j]);
        }
        member.max_ratio = *std::max_element(ratios.begin(), ratios.end());
        std::vector<double> sorted = ratios;
        std::sort(sorted.begin(), sorted.end());
        member.median_ratio = sorted.size() % 2 == 1
                                  ? sorted[sorted.size() / 2]
                                  : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
        rep.sup_ratio = std::max(rep.sup_ratio, member.max_ratio);
        rep.members.push_back(std::move(member));
    }
    return rep;
}

}
