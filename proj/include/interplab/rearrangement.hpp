#pragma once

// Distribution function and decreasing rearrangement of a sampled function
// with respect to a weight measure w(t)dt.  The sampled function is a step
// function vanishing off its grid, so the superlevel sets are finite unions
// of cells and everything below is exact cell-measure arithmetic: the
// rearrangement comes out as a right-continuous step function on the
// measure axis.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "interplab/sampled.hpp"
#include "interplab/weight.hpp"

namespace interplab {

// w-measure of {|f| > lambda}; infinite only if some occupied cell has
// infinite weight measure, which the weight engine reports.
inline IntegralValue distribution_function(const SampledFunction& f, const Weight& w, double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("distribution_function: lambda must be positive");
    const LogGrid& g = f.grid();
    double acc = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::abs(f[i]) > lambda) {
            IntegralValue m = w.integral(g.cell_left(i), g.cell_right(i));
            if (!m.finite) return IntegralValue::infinite();
            const double term = m.value - comp;
            const double next = acc + term;
            comp = (next - acc) - term;
            acc = next;
        }
    }
    return {true, acc};
}

// Step representation of the decreasing rearrangement: value levels[k] on
// [breakpoints[k], breakpoints[k+1]), levels strictly decreasing, zero at
// and beyond the final breakpoint.
struct RearrangementResult {
    std::vector<double> breakpoints;  // size m+1, breakpoints[0] == 0
    std::vector<double> levels;       // size m

    double total_measure() const { return breakpoints.empty() ? 0.0 : breakpoints.back(); }

    double value_at(double s) const {
        if (s < 0.0) throw std::domain_error("RearrangementResult::value_at: s must be nonnegative");
        for (std::size_t k = 0; k < levels.size(); ++k)
            if (s >= breakpoints[k] && s < breakpoints[k + 1]) return levels[k];
        return 0.0;
    }

    // int_0^t of the step function, exact.
    double integral_to(double t) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < levels.size(); ++k) {
            const double lo = breakpoints[k], hi = std::min(t, breakpoints[k + 1]);
            if (hi <= lo) break;
            acc += levels[k] * (hi - lo);
        }
        return acc;
    }
};

inline RearrangementResult decreasing_rearrangement(const SampledFunction& f, const Weight& w) {
    const LogGrid& g = f.grid();
    struct Cell { double value, measure; };
    std::vector<Cell> cells;
    cells.reserve(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double v = std::abs(f[i]);
        if (v == 0.0) continue;
        IntegralValue m = w.integral(g.cell_left(i), g.cell_right(i));
        if (!m.finite)
            throw std::domain_error("decreasing_rearrangement: occupied cell with infinite weight measure");
        if (m.value > 0.0) cells.push_back({v, m.value});
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.value > b.value; });
    RearrangementResult r;
    r.breakpoints.push_back(0.0);
    double acc = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < cells.size();) {
        std::size_t j = i;
        double block = 0.0;
        while (j < cells.size() && cells[j].value == cells[i].value) block += cells[j++].measure;
        const double term = block - comp;
        const double next = acc + term;
        comp = (next - acc) - term;
        acc = next;
        r.levels.push_back(cells[i].value);
        r.breakpoints.push_back(acc);
        i = j;
    }
    return r;
}

// int_0^1 w: finiteness decides whether the unit cutoff lives in any space
// built over w.
inline IntegralValue cutoff_integrability(const Weight& w) { return w.integral(0.0, 1.0); }

}
