#pragma once

// Sampled scalar functions: one value per grid node, read as a piecewise
// constant function on the node cells and as identically zero outside the
// grid span.  Integration against dt is therefore a finite sum and exact
// for the representation; smooth integrands sampled at the nodes pick up
// the usual midpoint-in-log error.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "interplab/grid.hpp"

namespace interplab {

class SampledFunction {
public:
    SampledFunction(LogGrid grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.size())
            throw std::invalid_argument("SampledFunction: value count must match grid size");
        for (double v : values_)
            if (!std::isfinite(v)) throw std::invalid_argument("SampledFunction: non-finite sample");
    }

    static SampledFunction sample(const LogGrid& grid, const std::function<double(double)>& f) {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid.node(i));
        return SampledFunction(grid, std::move(v));
    }

    static SampledFunction zero(const LogGrid& grid) {
        return SampledFunction(grid, std::vector<double>(grid.size(), 0.0));
    }

    // Indicator of (a, b), quantised to whole cells by node membership.
    static SampledFunction indicator(const LogGrid& grid, double a, double b) {
        if (!(a < b)) throw std::invalid_argument("SampledFunction::indicator: need a < b");
        std::vector<double> v(grid.size(), 0.0);
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (grid.node(i) > a && grid.node(i) < b) v[i] = 1.0;
        return SampledFunction(grid, std::move(v));
    }

    const LogGrid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    // Piecewise-constant evaluation; zero outside the grid span.
    double value_at(double t) const {
        if (!grid_.contains(t)) return 0.0;
        return values_[grid_.cell_index(t)];
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    SampledFunction map(const std::function<double(double)>& f) const {
        std::vector<double> v(values_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(values_[i]);
        return SampledFunction(grid_, std::move(v));
    }

private:
    LogGrid grid_;
    std::vector<double> values_;
};

// Exact integral of the piecewise-constant representation over [a, b].
inline double integrate(const SampledFunction& f, double a, double b) {
    const LogGrid& g = f.grid();
    if (!(a >= g.t_min() && b <= g.t_max() && a < b))
        throw std::domain_error("integrate: need t_min <= a < b <= t_max");
    double acc = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double lo = std::max(a, g.cell_left(i));
        const double hi = std::min(b, g.cell_right(i));
        if (hi > lo) {
            // Kahan accumulation: norm identities downstream compare sums
            // assembled in different orders.
            const double term = f[i] * (hi - lo) - comp;
            const double next = acc + term;
            comp = (next - acc) - term;
            acc = next;
        }
    }
    return acc;
}

inline double integrate(const SampledFunction& f) { return integrate(f, f.grid().t_min(), f.grid().t_max()); }

// Running integral F(t) = int_0^t f evaluated at every node (the mass below
// the grid is the caller's business; this counts from t_min).  Exact for the
// piecewise-constant representation.
inline std::vector<double> prefix_integrals_at_nodes(const SampledFunction& f) {
    const LogGrid& g = f.grid();
    std::vector<double> out(g.size());
    double below = 0.0;  // mass of cells fully left of cell i
    for (std::size_t i = 0; i < g.size(); ++i) {
        out[i] = below + f[i] * (g.node(i) - g.cell_left(i));
        below += f[i] * g.cell_length(i);
    }
    return out;
}

// Restriction of f to the outermost `decades` on each side; the norm of this
// piece is the honest "how much is riding on the edges" annotation.
inline SampledFunction edge_restriction(const SampledFunction& f, double decades) {
    const LogGrid& g = f.grid();
    const double lo = g.t_min() * std::pow(10.0, decades);
    const double hi = g.t_max() / std::pow(10.0, decades);
    std::vector<double> v(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.node(i) < lo || g.node(i) > hi) v[i] = f[i];
    return SampledFunction(g, std::move(v));
}

}
