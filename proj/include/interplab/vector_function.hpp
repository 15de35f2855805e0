#pragma once

// Vector-valued functions on a log grid, piecewise constant per cell, used
// for trace functions and Cauchy-problem solutions.

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "interplab/grid.hpp"
#include "interplab/matrix.hpp"
#include "interplab/sampled.hpp"

namespace interplab {

class VectorSampledFunction {
  public:
    VectorSampledFunction(LogGrid grid, std::vector<Vector> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.size())
            throw std::invalid_argument("VectorSampledFunction: values/grid size mismatch");
        if (values_.empty()) throw std::invalid_argument("VectorSampledFunction: empty");
        const auto dim = values_.front().size();
        for (const auto& v : values_) {
            if (v.size() != dim) throw std::invalid_argument("VectorSampledFunction: ragged values");
            if (!v.allFinite()) throw std::invalid_argument("VectorSampledFunction: non-finite entry");
        }
    }

    static VectorSampledFunction sample(const LogGrid& grid,
                                        const std::function<Vector(double)>& fn) {
        std::vector<Vector> vals;
        vals.reserve(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) vals.push_back(fn(grid.node(i)));
        return VectorSampledFunction(grid, std::move(vals));
    }

    static VectorSampledFunction zero(const LogGrid& grid, Eigen::Index dim) {
        return VectorSampledFunction(grid, std::vector<Vector>(grid.size(), Vector::Zero(dim)));
    }

    const LogGrid& grid() const { return grid_; }
    Eigen::Index dim() const { return values_.front().size(); }
    std::size_t size() const { return values_.size(); }
    const Vector& value(std::size_t i) const { return values_.at(i); }
    const std::vector<Vector>& values() const { return values_; }

    // Scalar reduction through a pointwise norm (or any nonneg functional).
    SampledFunction reduce(const std::function<double(const Vector&)>& norm) const {
        std::vector<double> out(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) out[i] = norm(values_[i]);
        return SampledFunction(grid_, std::move(out));
    }

    SampledFunction euclidean_norms() const {
        return reduce([](const Vector& v) { return v.norm(); });
    }

    VectorSampledFunction plus(const VectorSampledFunction& other) const {
        if (other.size() != size()) throw std::invalid_argument("plus: size mismatch");
        std::vector<Vector> vals(values_);
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] += other.values_[i];
        return VectorSampledFunction(grid_, std::move(vals));
    }

    double max_difference(const VectorSampledFunction& other) const {
        if (other.size() != size()) throw std::invalid_argument("max_difference: size mismatch");
        double m = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i)
            m = std::max(m, (values_[i] - other.values_[i]).cwiseAbs().maxCoeff());
        return m;
    }

  private:
    LogGrid grid_;
    std::vector<Vector> values_;
};

}
