#pragma once

// Weight classes governing boundedness of the averaging operators on
// weighted spaces: the P-side class with constant
//   sup_r (int_r^inf w/s^p ds) (int_0^r w^{1-p'} ds)^{p-1},
// its dual Q-side class reached through w -> w^{1/(1-p)}, the p=1
// endpoint conditions ||Qw/w||_inf and ||Pw/w||_inf, and the one-sided
// local class taken over triples a < b < c.  Analytic weights get exact
// divergence verdicts from exponent conditions; sampled weights rely on a
// windowed sweep whose growth rate is the divergence detector.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "interplab/weight.hpp"

namespace interplab {

struct SweepConfig {
    double r_lo = 1e-6, r_hi = 1e6;   // search range for the free parameter
    int points_per_decade = 8;
    int window_decades = 8;           // diagnostics curve length
    double growth_factor = 10.0;      // divergence detector: per-decade growth
    int growth_decades = 3;           // ... sustained this many decades
    int refine_rounds = 2;
};

struct ConstantEstimate {
    enum class Verdict { Finite, Diverging, Inconclusive };
    Verdict verdict = Verdict::Finite;
    double value = 0.0;     // supremum estimate (meaningful when Finite)
    double argmax = 0.0;    // maximizing parameter (r, or c for triples)
    std::string reason;
    std::vector<std::pair<double, double>> sweep;  // (window decades, windowed constant)

    bool finite() const { return verdict == Verdict::Finite; }
};

// True when the tail of the curve keeps growing by >= factor per decade for
// >= `decades` consecutive steps.
inline bool sweep_diverges(const std::vector<std::pair<double, double>>& curve, double factor,
                           int decades) {
    if (static_cast<int>(curve.size()) < decades + 1) return false;
    int run = 0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const double step = curve[i].first - curve[i - 1].first;
        if (curve[i].second >= curve[i - 1].second * std::pow(factor, step))
            ++run;
        else
            run = 0;
    }
    return run >= decades;
}

namespace detail {

inline std::vector<double> log_points(double lo, double hi, int per_decade) {
    std::vector<double> out;
    const int n = std::max(2, static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade)) + 1);
    for (int i = 0; i < n; ++i)
        out.push_back(std::clamp(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)), lo, hi));
    return out;
}

// Shared sup-over-r machinery for products F(r) = I1(r) * I2(r)^power.
template <typename Product>
ConstantEstimate sup_over_r(const Product& product, const SweepConfig& cfg) {
    ConstantEstimate out;
    auto eval_many = [&](const std::vector<double>& rs) {
        for (double r : rs) {
            const double v = product(r);
            if (v > out.value) {
                out.value = v;
                out.argmax = r;
            }
        }
    };
    eval_many(log_points(cfg.r_lo, cfg.r_hi, cfg.points_per_decade));
    double span = std::pow(10.0, 1.0 / cfg.points_per_decade);
    for (int round = 0; round < cfg.refine_rounds; ++round) {
        eval_many(log_points(out.argmax / span, out.argmax * span, cfg.points_per_decade * 8));
        span = std::sqrt(span);
    }
    return out;
}

}  // namespace detail

// Constant of the P-side class at exponent p > 1.
inline ConstantEstimate mp_constant(const Weight& w, double p, const SweepConfig& cfg = {}) {
    if (!(p > 1.0)) throw std::invalid_argument("mp_constant: need p > 1");
    const double pp = p / (p - 1.0);
    const Weight dual = w.pow(1.0 - pp);

    // Exact screens: either factor infinite at full range means divergence.
    if (!w.integral(1.0, detail::kInf, -p).finite) {
        ConstantEstimate out;
        out.verdict = ConstantEstimate::Verdict::Diverging;
        out.reason = "int_r^inf w/s^p diverges (tail exponent " + std::to_string(w.tail_exponent()) +
                     " >= p-1)";
        // windowed curve still recorded as evidence
        for (int d = 1; d <= cfg.window_decades; ++d) {
            const double hi = std::pow(10.0, d);
            double c = 0.0;
            for (double r : detail::log_points(1.0 / hi, hi, 4)) {
                const double i1 = w.integral(r, hi, -p).value;
                const double i2 = dual.integral(1.0 / hi, r).value;
                if (std::isfinite(i1) && std::isfinite(i2))
                    c = std::max(c, i1 * std::pow(i2, p - 1.0));
            }
            out.sweep.emplace_back(static_cast<double>(d), c);
        }
        return out;
    }
    if (!dual.integral(0.0, 1.0).finite) {
        ConstantEstimate out;
        out.verdict = ConstantEstimate::Verdict::Diverging;
        out.reason = "w^{1-p'} not integrable near 0 (head exponent " +
                     std::to_string(w.head_exponent()) + " >= p-1)";
        return out;
    }

    auto product = [&](double r) {
        const double i1 = w.integral(r, detail::kInf, -p).value;
        const double i2 = dual.integral(0.0, r).value;
        return i1 * std::pow(i2, p - 1.0);
    };
    ConstantEstimate out = detail::sup_over_r(product, cfg);
    for (int d = 1; d <= cfg.window_decades; ++d) {
        const double hi = std::pow(10.0, d);
        double c = 0.0;
        for (double r : detail::log_points(1.0 / hi, hi, 4)) {
            const double i1 = w.integral(r, hi, -p).value;
            const double i2 = dual.integral(1.0 / hi, r).value;
            c = std::max(c, i1 * std::pow(i2, p - 1.0));
        }
        out.sweep.emplace_back(static_cast<double>(d), c);
    }
    if (sweep_diverges(out.sweep, cfg.growth_factor, cfg.growth_decades)) {
        out.verdict = ConstantEstimate::Verdict::Diverging;
        out.reason = "windowed constant grows >= " + std::to_string(cfg.growth_factor) + "x/decade";
    }
    return out;
}

// p = 1 endpoint of the P-side scale: ess-sup of Pw/w.
inline ConstantEstimate m1_hardy_constant(const Weight& w, const SweepConfig& cfg = {}) {
    if (!w.integral(0.0, 1.0).finite) {
        ConstantEstimate out;
        out.verdict = ConstantEstimate::Verdict::Diverging;
        out.reason = "w not integrable near 0, Pw undefined";
        return out;
    }
    auto ratio = [&](double t) { return w.integral(0.0, t).value / (t * w.value_at(t)); };
    return detail::sup_over_r(ratio, cfg);
}

// ||Qw/w||_inf, the Q-side endpoint condition.
inline ConstantEstimate m1_constant(const Weight& w, const SweepConfig& cfg = {}) {
    if (!w.integral(1.0, detail::kInf, -1.0).finite) {
        ConstantEstimate out;
        out.verdict = ConstantEstimate::Verdict::Diverging;
        out.reason = "int^inf w/s ds diverges (tail exponent " + std::to_string(w.tail_exponent()) +
                     " >= 0)";
        return out;
    }
    auto ratio = [&](double t) { return w.integral(t, detail::kInf, -1.0).value / w.value_at(t); };
    return detail::sup_over_r(ratio, cfg);
}

// Q-side class at exponent p: transform w -> w^{1/(1-p)} and test the
// P-side class at the conjugate exponent; at p = 1 it is ||Pw/w||_inf.
inline ConstantEstimate mup_constant(const Weight& w, double p, const SweepConfig& cfg = {}) {
    if (!(p >= 1.0)) throw std::invalid_argument("mup_constant: need p >= 1");
    if (p == 1.0) return m1_hardy_constant(w, cfg);
    return mp_constant(w.pow(1.0 / (1.0 - p)), p / (p - 1.0), cfg);
}

struct TripleGridConfig {
    double c_lo = 1e-4, c_hi = 1e4;  // scale range (8 decades)
    int points_per_decade = 8;
    int refine_rounds = 3;
    int window_decades = 8;
    double growth_factor = 10.0;
    int growth_decades = 3;
};

// One-sided local constant: sup over 0 <= a < b < c of
// (c-a)^{-p} (int_b^c w)(int_a^b w^{1-p'})^{p-1}.
inline ConstantEstimate apminus_constant(const Weight& w, double p, const TripleGridConfig& cfg = {}) {
    if (!(p > 1.0)) throw std::invalid_argument("apminus_constant: need p > 1");
    const double pp = p / (p - 1.0);
    const Weight dual = w.pow(1.0 - pp);
    if (!dual.integral(0.0, 1.0).finite) {
        ConstantEstimate out;
        out.verdict = ConstantEstimate::Verdict::Diverging;
        out.reason = "w^{1-p'} not integrable near 0, windows [a,b] -> 0 blow up";
        return out;
    }

    // triple parametrised by scale c, a = u*c, b = a + v*(c-a)
    auto product = [&](double c, double u, double v) {
        const double a = u * c;
        const double b = a + v * (c - a);
        const double i1 = w.integral(b, c).value;
        const double i2 = dual.integral(a, b).value;
        return std::pow(c - a, -p) * i1 * std::pow(i2, p - 1.0);
    };

    ConstantEstimate out;
    double best_u = 0.0, best_v = 0.5;
    const std::vector<double> us{0.0, 0.1, 0.5};
    const std::vector<double> vs{0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9};
    for (double c : detail::log_points(cfg.c_lo, cfg.c_hi, cfg.points_per_decade))
        for (double u : us)
            for (double v : vs) {
                const double val = product(c, u, v);
                if (val > out.value) {
                    out.value = val;
                    out.argmax = c;
                    best_u = u;
                    best_v = v;
                }
            }
    double c_span = std::pow(10.0, 1.0 / cfg.points_per_decade), uv_span = 0.2;
    for (int round = 0; round < cfg.refine_rounds; ++round) {
        for (double c : detail::log_points(out.argmax / c_span, out.argmax * c_span, 64))
            for (int iu = -4; iu <= 4; ++iu)
                for (int iv = -4; iv <= 4; ++iv) {
                    const double u = std::clamp(best_u + uv_span * iu / 4.0, 0.0, 0.95);
                    const double v = std::clamp(best_v + uv_span * iv / 4.0, 0.01, 0.99);
                    const double val = product(c, u, v);
                    if (val > out.value) {
                        out.value = val;
                        out.argmax = c;
                        best_u = u;
                        best_v = v;
                    }
                }
        c_span = std::sqrt(c_span);
        uv_span *= 0.5;
    }

    for (int d = 1; d <= cfg.window_decades; ++d) {
        const double hi = std::pow(10.0, d);
        double cd = 0.0;
        for (double c : detail::log_points(1.0 / hi, hi, 4))
            for (double u : us)
                for (double v : vs) cd = std::max(cd, product(c, u, v));
        out.sweep.emplace_back(static_cast<double>(d), cd);
    }
    if (sweep_diverges(out.sweep, cfg.growth_factor, cfg.growth_decades)) {
        out.verdict = ConstantEstimate::Verdict::Diverging;
        out.reason = "windowed constant grows >= " + std::to_string(cfg.growth_factor) + "x/decade";
    }
    return out;
}

// Mirror class through the same w -> w^{1/(1-p)} transform.
inline ConstantEstimate applus_constant(const Weight& w, double p, const TripleGridConfig& cfg = {}) {
    if (!(p > 1.0)) throw std::invalid_argument("applus_constant: need p > 1");
    return apminus_constant(w.pow(1.0 / (1.0 - p)), p / (p - 1.0), cfg);
}

struct WeightClassReport {
    double p = 0.0;
    ConstantEstimate p_side;       // M_p-type constant
    ConstantEstimate q_side;       // dual class via the transform
    ConstantEstimate one_sided;    // A_p^- type constant
    ConstantEstimate one_sided_dual;
    bool calderon_class = false;   // both operator classes finite
    bool consistency_one_sided_in_p_side = true;
    double openness_probe_q = 0.0;
    ConstantEstimate openness_probe;  // one-sided constant just below p
};

// Full classification of w at exponent p: both operator-side classes, the
// one-sided pair, the intersection verdict, an inclusion consistency flag
// and an openness probe slightly below p.
inline WeightClassReport classify(const Weight& w, double p, const SweepConfig& sweep_cfg = {},
                                  const TripleGridConfig& triple_cfg = {}) {
    if (!(p > 1.0)) throw std::invalid_argument("classify: need p > 1");
    WeightClassReport rep;
    rep.p = p;
    rep.p_side = mp_constant(w, p, sweep_cfg);
    rep.q_side = mup_constant(w, p, sweep_cfg);
    rep.one_sided = apminus_constant(w, p, triple_cfg);
    rep.one_sided_dual = applus_constant(w, p, triple_cfg);
    rep.calderon_class = rep.p_side.finite() && rep.q_side.finite();
    // one-sided class members always satisfy the P-side condition
    rep.consistency_one_sided_in_p_side = !rep.one_sided.finite() || rep.p_side.finite();
    rep.openness_probe_q = 1.0 + 0.95 * (p - 1.0);
    rep.openness_probe = apminus_constant(w, rep.openness_probe_q, triple_cfg);
    return rep;
}

}
