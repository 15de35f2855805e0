#pragma once

// Rearrangement-invariant base spaces (Lebesgue and Lorentz) and weighted
// function spaces built from them: the norm of f against weight w is the
// base-space norm of the decreasing rearrangement of f with respect to
// w(t)dt.  Rearrangements of sampled functions are step functions, so the
// Lebesgue and Lorentz functionals below are evaluated in closed form.
// Dilation norms and Boyd-type indices quantify how the base space scales,
// which is what decides boundedness of the averaging operators later.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "interplab/errors.hpp"
#include "interplab/rearrangement.hpp"

namespace interplab {

struct RiSpace {
    enum class Kind { Lebesgue, Lorentz };
    Kind kind = Kind::Lebesgue;
    double p = 2.0;
    double q = 2.0;  // secondary exponent, Lorentz only

    static RiSpace lp(double p) {
        if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("RiSpace::lp: need p in [1, inf)");
        return RiSpace{Kind::Lebesgue, p, p};
    }

    static RiSpace lorentz(double p, double q) {
        if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("RiSpace::lorentz: need p in (1, inf)");
        if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("RiSpace::lorentz: need q in [1, inf)");
        return RiSpace{Kind::Lorentz, p, q};
    }

    // The Lorentz functional is only equivalent to a norm when q > p.
    bool quasi_norm() const { return kind == Kind::Lorentz && q > p; }

    std::string label() const {
        if (kind == Kind::Lebesgue) return "lp:" + std::to_string(p);
        return "lorentz:" + std::to_string(p) + "," + std::to_string(q);
    }
};

struct PhiSpace {
    RiSpace base;
    Weight weight;

    std::string label() const { return base.label() + "@" + weight.label(); }
};

// Classical weighted-power space (L^q, t^{q(1-theta)-1} dt); the workhorse
// parametrisation in all the equivalence experiments.
inline PhiSpace classical_phi(double theta, double q) {
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("classical_phi: need theta in (0,1)");
    return PhiSpace{RiSpace::lp(q), Weight::power(q * (1.0 - theta) - 1.0)};
}

// Base-space norm of a step rearrangement, closed form.
inline double ri_norm_of_rearrangement(const RiSpace& e, const RearrangementResult& r) {
    double acc = 0.0;
    if (e.kind == RiSpace::Kind::Lebesgue) {
        for (std::size_t k = 0; k < r.levels.size(); ++k)
            acc += std::pow(r.levels[k], e.p) * (r.breakpoints[k + 1] - r.breakpoints[k]);
        return std::pow(acc, 1.0 / e.p);
    }
    const double s = e.q / e.p;
    for (std::size_t k = 0; k < r.levels.size(); ++k)
        acc += std::pow(r.levels[k], e.q) *
               (std::pow(r.breakpoints[k + 1], s) - std::pow(r.breakpoints[k], s));
    return std::pow(acc / s, 1.0 / e.q);
}

struct NormValue {
    double value = 0.0;
    double edge_bound = 0.0;  // norm carried by the outermost decade at each end
    bool quasi_norm = false;
    bool extension_unstable = false;  // off-grid continuation fits disagreed
};

inline NormValue phi_norm(const PhiSpace& phi, const SampledFunction& f) {
    NormValue out;
    out.quasi_norm = phi.base.quasi_norm();
    out.value = ri_norm_of_rearrangement(phi.base, decreasing_rearrangement(f, phi.weight));
    const SampledFunction edges = edge_restriction(f, 1.0);
    out.edge_bound =
        ri_norm_of_rearrangement(phi.base, decreasing_rearrangement(edges, phi.weight));
    return out;
}

// ||f||_E with Lebesgue measure (weight 1).
inline double ri_norm(const RiSpace& e, const SampledFunction& f) {
    return ri_norm_of_rearrangement(e, decreasing_rearrangement(f, Weight::one()));
}

struct DilationEstimate {
    double value = 0.0;   // exact for Lebesgue, family lower bound otherwise
    bool analytic = false;
    int skipped = 0;      // family members with vanishing or non-finite norm
};

// Norm of the dilation f -> f(./t) on E.  For L^p this is t^{1/p} exactly;
// otherwise the supremum is approached from below over the given family.
inline DilationEstimate dilation_norm(const RiSpace& e, double t,
                                      const std::vector<SampledFunction>& family) {
    if (!(t > 0.0)) throw std::invalid_argument("dilation_norm: t must be positive");
    DilationEstimate out;
    if (e.kind == RiSpace::Kind::Lebesgue) {
        out.value = std::pow(t, 1.0 / e.p);
        out.analytic = true;
        return out;
    }
    for (const SampledFunction& f : family) {
        const double base = ri_norm(e, f);
        if (!(base > 0.0) || !std::isfinite(base)) {
            ++out.skipped;
            continue;
        }
        SampledFunction dil = SampledFunction::sample(f.grid(), [&](double s) { return f.value_at(s / t); });
        out.value = std::max(out.value, ri_norm(e, dil) / base);
    }
    if (out.value == 0.0) throw estimation_error("dilation_norm: no usable family member");
    return out;
}

// Indicators and near-critical powers, supported so that both f and its
// dilation by t stay inside the grid span.
inline std::vector<SampledFunction> boyd_test_family(const RiSpace& e, const LogGrid& g, double t) {
    std::vector<SampledFunction> fam;
    const double centre = std::sqrt(g.t_min() * g.t_max() / t);
    for (double c : {0.3, 1.0, 3.0}) {
        const double a = centre * c;
        if (a > 4.0 * g.t_min() && a * t > 4.0 * g.t_min() && a < 0.25 * g.t_max() &&
            a * t < 0.25 * g.t_max())
            fam.push_back(SampledFunction::indicator(g, 0.0, a));
    }
    const double gamma = 1.0 / e.p - 0.02;
    if (gamma > 0.0) {
        const double a = centre;
        if (a > 4.0 * g.t_min() && a * t < 0.25 * g.t_max())
            fam.push_back(SampledFunction::sample(
                g, [&](double s) { return s < a ? std::pow(s / a, -gamma) : 0.0; }));
    }
    if (fam.empty()) throw estimation_error("boyd_test_family: grid too narrow for dilation by t");
    return fam;
}

struct BoydIndices {
    double lower = 0.0;  // index from the t -> infinity side
    double upper = 0.0;  // index from the t -> 0 side
    std::vector<std::pair<double, double>> profile;  // (t, h_E(t)) samples
};

// Fit log h_E(t) ~ (1/p) log t on the outer decades of the t-range and read
// the indices off the slopes.
inline BoydIndices boyd_indices(const RiSpace& e, const std::vector<double>& t_grid,
                                const LogGrid& work_grid) {
    if (t_grid.size() < 8) throw std::invalid_argument("boyd_indices: need at least 8 dilation samples");
    BoydIndices out;
    for (double t : t_grid) {
        const auto fam = e.kind == RiSpace::Kind::Lebesgue ? std::vector<SampledFunction>{}
                                                           : boyd_test_family(e, work_grid, t);
        out.profile.emplace_back(t, dilation_norm(e, t, fam).value);
    }
    auto slope_over = [&](bool top) {
        double t_hi = 0.0, t_lo = 0.0;
        std::vector<double> xs, ys;
        if (top) {
            t_hi = out.profile.back().first;
            t_lo = t_hi / 1e3;
        } else {
            t_lo = out.profile.front().first;
            t_hi = t_lo * 1e3;
        }
        for (auto& [t, h] : out.profile)
            if (t >= t_lo && t <= t_hi && h > 0.0) {
                xs.push_back(std::log(t));
                ys.push_back(std::log(h));
            }
        if (xs.size() < 3) throw estimation_error("boyd_indices: too few samples in fit window");
        const double n = static_cast<double>(xs.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        if (!(slope > 1e-9))
            throw estimation_error("boyd_indices: degenerate dilation profile (slope ~ 0)");
        return slope;
    };
    out.lower = 1.0 / slope_over(true);
    out.upper = 1.0 / slope_over(false);
    return out;
}

struct CutoffMembership {
    bool unit_cutoff = false;     // chi_(0,1) in Phi
    bool averaged_cutoff = false; // min(1, 1/t) in Phi
    bool conclusive = true;
    std::string note;
};

// Membership of the two cutoff profiles that decide whether the weighted
// space is nontrivial.  Analytic weights reduce to exponent conditions;
// explicit weights get a truncation sweep.
inline CutoffMembership cutoff_membership(const PhiSpace& phi) {
    CutoffMembership out;
    out.unit_cutoff = cutoff_integrability(phi.weight).finite;
    if (!out.unit_cutoff) {
        out.note = "chi_(0,1) already fails: weight not integrable near 0";
        return out;
    }
    if (phi.weight.analytic()) {
        // Tail piece c t^b: the averaged cutoff decays like 1/t there, and
        // ||min(1,1/t)|| is finite iff b < p - 1 (equality diverges).
        out.averaged_cutoff = phi.weight.tail_exponent() < phi.base.p - 1.0;
        return out;
    }
    // Truncation sweep: grow the support of min(1,1/t) a decade at a time
    // and watch the norm converge or keep climbing.
    double prev = 0.0;
    bool settled = false, grew = false;
    for (int k = 2; k <= 8; ++k) {
        const double r = std::pow(10.0, k);
        LogGrid g(1.0 / r, r, static_cast<std::size_t>(160 * k));
        SampledFunction f = SampledFunction::sample(g, [](double t) { return std::min(1.0, 1.0 / t); });
        const double v = phi_norm(phi, f).value;
        if (k > 2) {
            const double rel = (v - prev) / std::max(v, 1e-300);
            if (rel < 5e-4) { settled = true; break; }
            if (rel > 0.05) grew = true;
        }
        prev = v;
    }
    out.averaged_cutoff = settled;
    out.conclusive = settled || grew;
    if (!out.conclusive) out.note = "truncation sweep inconclusive";
    return out;
}

}
