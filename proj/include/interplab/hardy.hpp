#pragma once

// Averaging operator Pf(t) = (1/t) int_0^t f, its companion
// Qf(t) = int_t^infty f(s) ds/s, and their sum.  On piecewise-constant
// data both are evaluated in closed form per cell; the mass of f below
// the grid (for P) and above it (for Q) comes from a fitted power
// continuation and is reported, never silently dropped.  The pairing
// int f Qg = int g Pf is computed by two independent exact formulas,
// which is the duality check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "interplab/spaces.hpp"

namespace interplab {

struct HardyResult {
    SampledFunction values;
    double boundary_mass = 0.0;   // extrapolated contribution outside the grid
    double boundary_error = 0.0;  // conservative bound on that model term
};

// Pf at every node.  The head int_0^{t_min} f is a fitted power
// continuation of the first decade (exact when f is a power there).
inline HardyResult apply_hardy(const SampledFunction& f) {
    const LogGrid& g = f.grid();
    const auto fit = detail::fit_power_head(f);
    double head = 0.0;
    if (fit.usable) {
        if (fit.exponent <= -1.0)
            throw std::domain_error("apply_hardy: head behaves like t^" + std::to_string(fit.exponent) +
                                    ", not integrable near 0");
        head = fit.coeff * std::pow(g.t_min(), fit.exponent + 1.0) / (fit.exponent + 1.0);
    }
    std::vector<double> out(g.size());
    const auto prefix = prefix_integrals_at_nodes(f);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = (head + prefix[i]) / g.node(i);
    return HardyResult{SampledFunction(g, std::move(out)), head, std::abs(head)};
}

// Qf at every node, with the fitted power tail above t_max; a non-decaying
// tail makes Qf infinite and is rejected.
inline HardyResult apply_adjoint(const SampledFunction& f) {
    const LogGrid& g = f.grid();
    const auto fit = detail::fit_power_tail(f);
    double tail = 0.0;
    if (fit.usable) {
        if (fit.exponent >= 0.0)
            throw std::domain_error("apply_adjoint: tail behaves like t^" + std::to_string(fit.exponent) +
                                    ", int^infty f/s diverges");
        tail = -fit.coeff * std::pow(g.t_max(), fit.exponent) / fit.exponent;
    }
    std::vector<double> out(g.size());
    double above = tail;  // int over (cell_right(i), infinity) of f/s
    for (std::size_t i = g.size(); i-- > 0;) {
        out[i] = above + f[i] * std::log(g.cell_right(i) / g.node(i));
        above += f[i] * std::log(g.cell_right(i) / g.cell_left(i));
    }
    return HardyResult{SampledFunction(g, std::move(out)), tail, std::abs(tail)};
}

inline HardyResult apply_calderon(const SampledFunction& f) {
    HardyResult p = apply_hardy(f);
    HardyResult q = apply_adjoint(f);
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = p.values[i] + q.values[i];
    return HardyResult{SampledFunction(f.grid(), std::move(out)), p.boundary_mass + q.boundary_mass,
                       p.boundary_error + q.boundary_error};
}

// int f.(Qg) dt for the pure step extensions (no tail model), closed form.
inline double pairing_through_adjoint(const SampledFunction& f, const SampledFunction& g) {
    const LogGrid& gr = f.grid();
    double above = 0.0;  // int over cells right of i of g/s
    double acc = 0.0;
    for (std::size_t i = gr.size(); i-- > 0;) {
        const double lo = gr.cell_left(i), hi = gr.cell_right(i);
        const double len = hi - lo;
        // int_lo^hi log(hi/t) dt = len - lo log(hi/lo)
        acc += f[i] * (above * len + g[i] * (len - lo * std::log(hi / lo)));
        above += g[i] * std::log(hi / lo);
    }
    return acc;
}

// int g.(Pf) dt for the same step extensions, closed form.
inline double pairing_through_hardy(const SampledFunction& f, const SampledFunction& g) {
    const LogGrid& gr = f.grid();
    double below = 0.0;  // int over cells left of i of f
    double acc = 0.0;
    for (std::size_t i = 0; i < gr.size(); ++i) {
        const double lo = gr.cell_left(i), hi = gr.cell_right(i);
        const double len = hi - lo;
        // int_lo^hi (below + f (t - lo)) dt/t
        acc += g[i] * ((below - f[i] * lo) * std::log(hi / lo) + f[i] * len);
        below += f[i] * len;
    }
    return acc;
}

// Relative mismatch of the two pairing routes; zero up to rounding when the
// implementations are mutually consistent.
inline double duality_residual(const SampledFunction& f, const SampledFunction& g) {
    if (f.grid().size() != g.grid().size() || f.grid().t_min() != g.grid().t_min() ||
        f.grid().t_max() != g.grid().t_max())
        throw std::invalid_argument("duality_residual: f and g must share a grid");
    const double a = pairing_through_adjoint(f, g);
    const double b = pairing_through_hardy(f, g);
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

enum class AveragingOp { Hardy, Adjoint, Calderon };

inline HardyResult apply_averaging(AveragingOp op, const SampledFunction& f) {
    switch (op) {
        case AveragingOp::Hardy: return apply_hardy(f);
        case AveragingOp::Adjoint: return apply_adjoint(f);
        default: return apply_calderon(f);
    }
}

// L^p(w) norm of a sampled function together with the mass of its fitted
// power continuations below and above the grid.  Ratios of extended norms
// compare the untruncated functions, which matters for the near-extremal
// powers whose mass concentrates off-grid; the averaging operators continue
// the same fits, so numerator and denominator stay consistent.  Either
// continuation can be switched off when the function is known to vanish
// on that side.
inline NormValue extended_lp_norm(const PhiSpace& phi, const SampledFunction& f,
                                  bool extend_head = true, bool extend_tail = true) {
    if (phi.base.kind != RiSpace::Kind::Lebesgue)
        throw std::invalid_argument("extended_lp_norm: Lebesgue bases only");
    const double p = phi.base.p;
    const LogGrid& g = f.grid();
    double acc = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == 0.0) continue;
        const IntegralValue cell = phi.weight.integral(g.cell_left(i), g.cell_right(i));
        const double term = std::pow(std::abs(f[i]), p) * cell.value - comp;
        const double next = acc + term;
        comp = (next - acc) - term;
        acc = next;
    }
    const SampledFunction af = f.map([](double v) { return std::abs(v); });
    const std::size_t k = detail::decade_count_nodes(g);
    bool infinite = false, unstable = false;

    // Mass of one fitted continuation; the fit over the adjacent decade must
    // extrapolate to a similar mass, otherwise the smaller one is used: a
    // barely-convergent continuation magnifies small exponent errors.  A
    // divergent model likewise needs both windows to agree before the norm
    // is declared infinite, since a transient slope in one decade must not
    // extrapolate to a singularity.
    auto fitted_mass = [&](std::size_t lo1, std::size_t hi1, std::size_t lo2, std::size_t hi2,
                           double int_a, double int_b) -> double {
        const auto fit = detail::fit_power_window(af, lo1, hi1);
        if (!fit.usable) return 0.0;
        const IntegralValue m1 = phi.weight.integral(int_a, int_b, fit.exponent * p);
        const double mass1 = m1.finite ? std::pow(fit.coeff, p) * m1.value
                                       : std::numeric_limits<double>::infinity();
        const auto fit2 = detail::fit_power_window(af, lo2, hi2);
        if (!fit2.usable) {
            if (!m1.finite) {
                infinite = true;
                return 0.0;
            }
            unstable = true;
            return mass1;
        }
        const IntegralValue m2 = phi.weight.integral(int_a, int_b, fit2.exponent * p);
        const double mass2 = m2.finite ? std::pow(fit2.coeff, p) * m2.value
                                       : std::numeric_limits<double>::infinity();
        if (!std::isfinite(mass1) && !std::isfinite(mass2)) {
            infinite = true;
            return 0.0;
        }
        if (!std::isfinite(mass1) || !std::isfinite(mass2)) {
            unstable = true;
            return std::min(mass1, mass2);
        }
        if (std::abs(mass1 - mass2) > 0.1 * std::max(mass1, mass2)) {
            unstable = true;
            return std::min(mass1, mass2);
        }
        return mass1;
    };

    double ends = 0.0;
    if (extend_head && af[0] > 0.0)
        ends += fitted_mass(0, std::min(af.size(), k + 1), std::min(af.size(), k + 1),
                            std::min(af.size(), 2 * k + 1), 0.0, g.t_min());
    if (extend_tail && af[af.size() - 1] > 0.0) {
        const std::size_t n = af.size();
        ends += fitted_mass(n - std::min(n, k + 1), n, n - std::min(n, 2 * k + 1),
                            n - std::min(n, k + 1), g.t_max(), detail::kInf);
    }
    NormValue out;
    out.quasi_norm = phi.base.quasi_norm();
    if (infinite) {
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }
    out.value = std::pow(acc + ends, 1.0 / p);
    out.edge_bound = ends > 0.0 ? std::pow(ends, 1.0 / p) : 0.0;
    out.extension_unstable = unstable;
    return out;
}

struct OpNormEstimate {
    double lower_bound = 0.0;
    int skipped = 0;
    std::vector<std::string> notes;
};

// max over the family of ||op f|| / ||f||; members with zero or non-finite
// norm are skipped and reported.  Lebesgue bases use the extended norm so
// the ratios account for the off-grid continuations of both functions; when
// either continuation is flagged unstable the member contributes the plain
// on-grid ratio instead, since a barely-convergent extrapolation can inflate
// one side of the quotient past the true operator norm.
inline OpNormEstimate opnorm_lower(AveragingOp op, const PhiSpace& phi,
                                   const std::vector<SampledFunction>& family) {
    if (family.empty()) throw std::invalid_argument("opnorm_lower: empty family");
    const bool lebesgue = phi.base.kind == RiSpace::Kind::Lebesgue;
    auto measure = [&](const SampledFunction& f, bool extend) {
        return lebesgue ? extended_lp_norm(phi, f, extend, extend) : phi_norm(phi, f);
    };
    OpNormEstimate out;
    for (std::size_t i = 0; i < family.size(); ++i) {
        NormValue base = measure(family[i], true);
        if (!(base.value > 0.0) || !std::isfinite(base.value)) {
            ++out.skipped;
            out.notes.push_back("member " + std::to_string(i) + " skipped: norm " +
                                std::to_string(base.value));
            continue;
        }
        std::optional<HardyResult> img;
        try {
            img.emplace(apply_averaging(op, family[i]));
        } catch (const std::domain_error& e) {
            ++out.skipped;
            out.notes.push_back("member " + std::to_string(i) + " skipped: " + e.what());
            continue;
        }
        NormValue image = measure(img->values, true);
        if (!std::isfinite(image.value)) {
            ++out.skipped;
            out.notes.push_back("member " + std::to_string(i) + " skipped: image norm not finite");
            continue;
        }
        if (lebesgue && (base.extension_unstable || image.extension_unstable)) {
            base = measure(family[i], false);
            image = measure(img->values, false);
            out.notes.push_back("member " + std::to_string(i) +
                                ": unstable continuation, on-grid ratio used");
            if (!(base.value > 0.0) || !std::isfinite(image.value)) {
                ++out.skipped;
                continue;
            }
        }
        out.lower_bound = std::max(out.lower_bound, image.value / base.value);
    }
    if (out.skipped == static_cast<int>(family.size()))
        throw estimation_error("opnorm_lower: every family member was skipped");
    return out;
}

// Powers approaching the critical decay of the space, plus cutoffs; these
// push the averaging norm toward its supremum.  The power members are
// chosen per operator so that both the member and its image continue off
// the grid as exact powers: blowup at 0 for P (whose image then carries
// the same head power), decay past critical at infinity for Q.  The sum
// reuses the head members, which are near-extremal for it as well.
inline std::vector<SampledFunction> near_extremal_family(AveragingOp op, const PhiSpace& phi,
                                                         const LogGrid& g) {
    std::vector<SampledFunction> fam;
    if (op != AveragingOp::Adjoint) {
        const double critical = (1.0 + phi.weight.head_exponent()) / phi.base.p;
        for (double eps : {0.01, 0.02, 0.05}) {
            const double gamma = critical - eps;
            if (gamma <= 0.0) continue;
            fam.push_back(SampledFunction::sample(
                g, [gamma](double t) { return t < 1.0 ? std::pow(t, -gamma) : 0.0; }));
        }
    }
    if (op == AveragingOp::Adjoint) {
        const double tail_critical = (1.0 + phi.weight.tail_exponent()) / phi.base.p;
        for (double eps : {0.01, 0.02, 0.05}) {
            const double gamma = tail_critical + eps;
            fam.push_back(SampledFunction::sample(
                g, [gamma](double t) { return t >= 1.0 ? std::pow(t, -gamma) : 0.0; }));
        }
    }
    fam.push_back(SampledFunction::indicator(g, 0.0, 1.0));
    fam.push_back(SampledFunction::indicator(g, 1.0, 100.0));
    return fam;
}

// Sharp constants the estimates are compared against: p/(p-1) for P on L^p,
// and q/(q-1-a) for P on L^q(t^a dt) when a < q-1.
inline double hardy_upper_lp(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("hardy_upper_lp: need p > 1");
    return p / (p - 1.0);
}

inline double hardy_upper_weighted(double q, double a) {
    if (!(a < q - 1.0)) throw std::invalid_argument("hardy_upper_weighted: need a < q-1");
    return q / (q - 1.0 - a);
}

// q/(1+a) for Q on L^q(t^a dt) when a > -1, by duality with P.
inline double adjoint_upper_weighted(double q, double a) {
    if (!(q > 1.0)) throw std::invalid_argument("adjoint_upper_weighted: need q > 1");
    if (!(a > -1.0)) throw std::invalid_argument("adjoint_upper_weighted: need a > -1");
    return q / (1.0 + a);
}

inline double calderon_upper_weighted(double q, double a) {
    return hardy_upper_weighted(q, a) + adjoint_upper_weighted(q, a);
}

}
