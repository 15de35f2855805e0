#pragma once

// Weights on (0, infinity).  Analytic weights are finite lists of power
// pieces c * t^a covering (0, infinity), so every moment integral
// int_a^b w(t) t^q dt has a closed form and divergence is an exponent
// condition, not a sampling artifact.  Explicit weights carry samples on a
// log grid plus fitted power behaviour outside the sampled span.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "interplab/sampled.hpp"

namespace interplab {

struct IntegralValue {
    bool finite = true;
    double value = 0.0;

    static IntegralValue infinite() { return {false, std::numeric_limits<double>::infinity()}; }
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exact int_a^b t^e dt with 0 <= a < b <= inf.
inline IntegralValue power_integral(double a, double b, double e) {
    if (a >= b) return {true, 0.0};
    if (b == kInf && e >= -1.0) return IntegralValue::infinite();
    if (a == 0.0 && e <= -1.0) return IntegralValue::infinite();
    if (e == -1.0) return {true, std::log(b / a)};
    const double p = e + 1.0;
    const double hi = (b == kInf) ? 0.0 : std::pow(b, p);
    const double lo = (a == 0.0) ? 0.0 : std::pow(a, p);
    return {true, (hi - lo) / p};
}

// Least-squares fit of log v against log t; usable only when every sample
// in the window is strictly positive.
struct PowerFit {
    double coeff = 0.0;
    double exponent = 0.0;
    bool usable = false;
};

inline PowerFit fit_power_window(const SampledFunction& f, std::size_t lo, std::size_t hi) {
    PowerFit fit;
    if (hi <= lo + 1) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
        if (!(f[i] > 0.0)) return fit;
        const double x = std::log(f.grid().node(i));
        const double y = std::log(f[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-14 * (n * sxx + sx * sx + 1.0)) return fit;
    fit.exponent = (n * sxy - sx * sy) / det;
    fit.coeff = std::exp((sy - fit.exponent * sx) / n);
    fit.usable = true;
    return fit;
}

inline std::size_t decade_count_nodes(const LogGrid& g) {
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(g.nodes_per_decade())));
}

inline PowerFit fit_power_head(const SampledFunction& f) {
    const std::size_t k = std::min(f.size(), decade_count_nodes(f.grid()) + 1);
    return fit_power_window(f, 0, k);
}

inline PowerFit fit_power_tail(const SampledFunction& f) {
    const std::size_t k = std::min(f.size(), decade_count_nodes(f.grid()) + 1);
    return fit_power_window(f, f.size() - k, f.size());
}

}  // namespace detail

class Weight {
public:
    struct Piece {
        double lo, hi;    // half-open [lo, hi), lo may be 0, hi may be inf
        double coeff;
        double exponent;  // coeff * t^exponent
    };

    static Weight one() { return power(0.0); }

    static Weight power(double alpha) {
        Weight w;
        w.pieces_ = {Piece{0.0, detail::kInf, 1.0, alpha}};
        w.label_ = "pow:" + format(alpha);
        return w;
    }

    // t^alpha on (0,1), t^beta on [1,inf); continuous at the breakpoint.
    static Weight piecewise_power(double alpha, double beta) {
        Weight w;
        w.pieces_ = {Piece{0.0, 1.0, 1.0, alpha}, Piece{1.0, detail::kInf, 1.0, beta}};
        w.label_ = "pp:" + format(alpha) + "," + format(beta);
        return w;
    }

    static Weight explicit_samples(SampledFunction samples) {
        for (double v : samples.values())
            if (!(v > 0.0))
                throw std::invalid_argument("Weight::explicit_samples: samples must be strictly positive");
        Weight w;
        w.samples_.emplace(std::move(samples));
        w.head_fit_ = detail::fit_power_head(*w.samples_);
        w.tail_fit_ = detail::fit_power_tail(*w.samples_);
        w.label_ = "explicit";
        return w;
    }

    bool analytic() const { return !samples_.has_value(); }
    const std::string& label() const { return label_; }

    double value_at(double t) const {
        if (!(t > 0.0)) throw std::domain_error("Weight::value_at: t must be positive");
        if (analytic()) {
            for (const Piece& p : pieces_)
                if (t >= p.lo && t < p.hi) return p.coeff * std::pow(t, p.exponent);
            return 0.0;  // unreachable: pieces cover (0, inf)
        }
        const LogGrid& g = samples_->grid();
        if (t < g.t_min())
            return head_fit_.usable ? head_fit_.coeff * std::pow(t, head_fit_.exponent) : (*samples_)[0];
        if (t > g.t_max())
            return tail_fit_.usable ? tail_fit_.coeff * std::pow(t, tail_fit_.exponent)
                                    : (*samples_)[samples_->size() - 1];
        return samples_->value_at(t);
    }

    // Power behaviour near zero / infinity; drives divergence verdicts.
    double head_exponent() const {
        if (analytic()) return pieces_.front().exponent;
        return head_fit_.usable ? head_fit_.exponent : 0.0;
    }
    double tail_exponent() const {
        if (analytic()) return pieces_.back().exponent;
        return tail_fit_.usable ? tail_fit_.exponent : 0.0;
    }

    // w^gamma.
    Weight pow(double gamma) const {
        Weight w;
        if (analytic()) {
            w.pieces_ = pieces_;
            for (Piece& p : w.pieces_) {
                p.coeff = std::pow(p.coeff, gamma);
                p.exponent *= gamma;
            }
        } else {
            w.samples_.emplace(samples_->map([gamma](double v) { return std::pow(v, gamma); }));
            w.head_fit_ = head_fit_;
            w.tail_fit_ = tail_fit_;
            if (w.head_fit_.usable) {
                w.head_fit_.coeff = std::pow(head_fit_.coeff, gamma);
                w.head_fit_.exponent = head_fit_.exponent * gamma;
            }
            if (w.tail_fit_.usable) {
                w.tail_fit_.coeff = std::pow(tail_fit_.coeff, gamma);
                w.tail_fit_.exponent = tail_fit_.exponent * gamma;
            }
        }
        w.label_ = "(" + label_ + ")^" + format(gamma);
        return w;
    }

    // t |-> w(lambda t).
    Weight dilate(double lambda) const {
        if (!(lambda > 0.0)) throw std::invalid_argument("Weight::dilate: lambda must be positive");
        Weight w;
        if (analytic()) {
            w.pieces_ = pieces_;
            for (Piece& p : w.pieces_) {
                p.lo /= lambda;
                if (p.hi != detail::kInf) p.hi /= lambda;
                p.coeff *= std::pow(lambda, p.exponent);
            }
        } else {
            const LogGrid& g = samples_->grid();
            LogGrid scaled(g.t_min() / lambda, g.t_max() / lambda, g.size());
            w.samples_.emplace(scaled, samples_->values());
            w.head_fit_ = head_fit_;
            w.tail_fit_ = tail_fit_;
            if (w.head_fit_.usable) w.head_fit_.coeff *= std::pow(lambda, head_fit_.exponent);
            if (w.tail_fit_.usable) w.tail_fit_.coeff *= std::pow(lambda, tail_fit_.exponent);
        }
        w.label_ = label_ + "@dilate:" + format(lambda);
        return w;
    }

    // Product of two analytic weights (piece boundaries merge).
    Weight times(const Weight& other) const {
        if (!analytic() || !other.analytic())
            throw std::invalid_argument("Weight::times: products require analytic factors");
        std::vector<double> cuts{0.0};
        for (const Piece& p : pieces_) if (p.hi != detail::kInf) cuts.push_back(p.hi);
        for (const Piece& p : other.pieces_) if (p.hi != detail::kInf) cuts.push_back(p.hi);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        cuts.push_back(detail::kInf);
        Weight w;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double lo = cuts[i], hi = cuts[i + 1];
            const double mid = (hi == detail::kInf) ? lo + 1.0 : 0.5 * (lo + hi);
            const Piece a = piece_at(std::max(mid, 1e-300));
            const Piece b = other.piece_at(std::max(mid, 1e-300));
            w.pieces_.push_back(Piece{lo, hi, a.coeff * b.coeff, a.exponent + b.exponent});
        }
        w.label_ = label_ + "*" + other.label_;
        return w;
    }

    // Exact-where-analytic int_a^b w(t) t^q dt; a may be 0, b may be inf.
    IntegralValue integral(double a, double b, double q = 0.0) const {
        if (a < 0.0 || b < a) throw std::domain_error("Weight::integral: need 0 <= a <= b");
        if (a == b) return {true, 0.0};
        if (analytic()) {
            double total = 0.0;
            for (const Piece& p : pieces_) {
                const double lo = std::max(a, p.lo);
                const double hi = std::min(b, p.hi);
                if (hi <= lo) continue;
                IntegralValue part = detail::power_integral(lo, hi, p.exponent + q);
                if (!part.finite) return IntegralValue::infinite();
                total += p.coeff * part.value;
            }
            return {true, total};
        }
        return explicit_integral(a, b, q);
    }

    const std::vector<Piece>& pieces() const {
        if (!analytic()) throw std::logic_error("Weight::pieces: explicit weight");
        return pieces_;
    }
    const SampledFunction& samples() const {
        if (analytic()) throw std::logic_error("Weight::samples: analytic weight");
        return *samples_;
    }

private:
    Weight() = default;

    static std::string format(double x) {
        std::ostringstream os;
        os << x;
        return os.str();
    }

    Piece piece_at(double t) const {
        for (const Piece& p : pieces_)
            if (t >= p.lo && t < p.hi) return p;
        return pieces_.back();
    }

    IntegralValue explicit_integral(double a, double b, double q) const {
        const LogGrid& g = samples_->grid();
        double total = 0.0;
        // head: fitted power below the sampled span
        if (a < g.t_min()) {
            const double hi = std::min(b, g.t_min());
            if (head_fit_.usable) {
                IntegralValue part = detail::power_integral(a, hi, head_fit_.exponent + q);
                if (!part.finite) return IntegralValue::infinite();
                total += head_fit_.coeff * part.value;
            } else {
                IntegralValue part = detail::power_integral(std::max(a, 1e-300), hi, q);
                if (!part.finite) return IntegralValue::infinite();
                total += (*samples_)[0] * part.value;
            }
        }
        // sampled span: constant on cells, so each cell is a power integral
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double lo = std::max(a, g.cell_left(i));
            const double hi = std::min(b, g.cell_right(i));
            if (hi <= lo) continue;
            total += (*samples_)[i] * detail::power_integral(lo, hi, q).value;
        }
        // tail: fitted power above the sampled span
        if (b > g.t_max()) {
            const double lo = std::max(a, g.t_max());
            const double c = tail_fit_.usable ? tail_fit_.coeff : (*samples_)[samples_->size() - 1];
            const double e = tail_fit_.usable ? tail_fit_.exponent : 0.0;
            IntegralValue part = detail::power_integral(lo, b, e + q);
            if (!part.finite) return IntegralValue::infinite();
            total += c * part.value;
        }
        return {true, total};
    }

    std::vector<Piece> pieces_;
    std::optional<SampledFunction> samples_;
    detail::PowerFit head_fit_, tail_fit_;
    std::string label_;
};

}
