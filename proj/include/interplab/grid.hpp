#pragma once

// Log-uniform grids on (0, infinity).  A grid carries n nodes placed
// geometrically between t_min and t_max plus the cell partition around
// them: cell i is [e_i, e_{i+1}] with e_i the geometric midpoint of
// neighbouring nodes (outer edges clamped to t_min, t_max).  Piecewise
// constant data on the cells makes every later quadrature a closed-form
// sum, which is what keeps norm identities exact instead of O(h^2).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace interplab {

class LogGrid {
public:
    LogGrid(double t_min, double t_max, std::size_t n) : t_min_(t_min), t_max_(t_max) {
        if (!(t_min > 0.0) || !(t_max > t_min))
            throw std::invalid_argument("LogGrid: need 0 < t_min < t_max");
        if (n < 2) throw std::invalid_argument("LogGrid: need at least 2 nodes");
        nodes_.resize(n);
        const double lo = std::log(t_min), hi = std::log(t_max);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
            nodes_[i] = std::exp(u);
        }
        nodes_.front() = t_min;
        nodes_.back() = t_max;
        edges_.resize(n + 1);
        edges_.front() = t_min;
        edges_.back() = t_max;
        for (std::size_t i = 1; i < n; ++i) edges_[i] = std::sqrt(nodes_[i - 1] * nodes_[i]);
    }

    std::size_t size() const { return nodes_.size(); }
    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }
    const std::vector<double>& nodes() const { return nodes_; }
    double node(std::size_t i) const { return nodes_[i]; }
    double cell_left(std::size_t i) const { return edges_[i]; }
    double cell_right(std::size_t i) const { return edges_[i + 1]; }
    double cell_length(std::size_t i) const { return edges_[i + 1] - edges_[i]; }

    // Common ratio between consecutive nodes.
    double ratio() const { return nodes_[1] / nodes_[0]; }

    double nodes_per_decade() const {
        return static_cast<double>(size() - 1) / std::log10(t_max_ / t_min_);
    }

    bool contains(double t) const { return t >= t_min_ && t <= t_max_; }

    // Index of the cell holding t.  Cells are half-open [e_i, e_{i+1}) except
    // the last, which is closed at t_max.
    std::size_t cell_index(double t) const {
        if (!contains(t))
            throw std::domain_error("LogGrid::cell_index: t=" + std::to_string(t) + " outside grid");
        const double step = std::log(ratio());
        auto i = static_cast<std::ptrdiff_t>(std::floor(std::log(t / edges_.front()) / step + 0.5));
        i = std::max<std::ptrdiff_t>(0, std::min<std::ptrdiff_t>(i, static_cast<std::ptrdiff_t>(size()) - 1));
        // Rounding through logs can land one cell off; fix up locally.
        while (i > 0 && t < edges_[static_cast<std::size_t>(i)]) --i;
        while (i + 1 < static_cast<std::ptrdiff_t>(size()) && t >= edges_[static_cast<std::size_t>(i) + 1]) ++i;
        return static_cast<std::size_t>(i);
    }

    // Same span, factor-times more intervals.
    LogGrid refined(std::size_t factor) const {
        if (factor == 0) throw std::invalid_argument("LogGrid::refined: zero factor");
        return LogGrid(t_min_, t_max_, (size() - 1) * factor + 1);
    }

    // Extend the span by whole cells at the same density so existing nodes
    // stay put.  decades counts per side.
    LogGrid padded(double decades_below, double decades_above) const {
        const double step = std::log(ratio());
        const auto k_lo = static_cast<std::size_t>(std::ceil(decades_below * std::log(10.0) / step));
        const auto k_hi = static_cast<std::size_t>(std::ceil(decades_above * std::log(10.0) / step));
        const double lo = t_min_ * std::exp(-static_cast<double>(k_lo) * step);
        const double hi = t_max_ * std::exp(static_cast<double>(k_hi) * step);
        return LogGrid(lo, hi, size() + k_lo + k_hi);
    }

private:
    double t_min_, t_max_;
    std::vector<double> nodes_;
    std::vector<double> edges_;
};

inline LogGrid build_log_grid(double t_min, double t_max, std::size_t n) {
    return LogGrid(t_min, t_max, n);
}

}
