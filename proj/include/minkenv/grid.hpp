#pragma once

// Uniform sample grid over an open parameter interval, and fourth-order
// finite differences on it. The grid insets both endpoints by half a step
// so expressions that degenerate exactly at the interval ends (radicals
// vanishing, lightlike limits) are never evaluated there.

#include "minkenv/minkowski.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace minkenv {

struct Grid {
    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t n = 0;
    double h = 0.0;
    std::vector<double> t;

    static Grid uniform(double t_min, double t_max, std::size_t n) {
        if (!(t_min < t_max)) throw std::invalid_argument("grid: t_min must be < t_max");
        if (n < 16) throw std::invalid_argument("grid: need at least 16 samples");
        Grid g;
        g.t_min = t_min;
        g.t_max = t_max;
        g.n = n;
        g.h = (t_max - t_min) / static_cast<double>(n);
        g.t.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            g.t[i] = t_min + (static_cast<double>(i) + 0.5) * g.h;
        return g;
    }

    /// Index of the sample nearest to t0.
    std::size_t nearest_index(double t0) const {
        if (t0 <= t.front()) return 0;
        if (t0 >= t.back()) return n - 1;
        const double x = (t0 - t_min) / h - 0.5;
        const auto i = static_cast<std::size_t>(x + 0.5);
        return i >= n ? n - 1 : i;
    }

    bool contains(double t0) const { return t0 > t_min && t0 < t_max; }
};

/// First derivative of sampled values by fourth-order central differences,
/// with one-sided fourth-order stencils at the first and last two samples.
/// Requires at least 5 samples.
template <typename T>
std::vector<T> grid_derivative(const std::vector<T>& f, double h) {
    const std::size_t n = f.size();
    if (n < 5) throw std::invalid_argument("grid_derivative: need at least 5 samples");
    std::vector<T> d(n);
    const double s = 1.0 / (12.0 * h);
    d[0] = (f[0] * -25.0 + f[1] * 48.0 + f[2] * -36.0 + f[3] * 16.0 + f[4] * -3.0) * s;
    d[1] = (f[0] * -3.0 + f[1] * -10.0 + f[2] * 18.0 + f[3] * -6.0 + f[4] * 1.0) * s;
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (f[i - 2] * 1.0 + f[i - 1] * -8.0 + f[i + 1] * 8.0 + f[i + 2] * -1.0) * s;
    d[n - 2] =
        (f[n - 1] * 3.0 + f[n - 2] * 10.0 + f[n - 3] * -18.0 + f[n - 4] * 6.0 + f[n - 5] * -1.0) * s;
    d[n - 1] =
        (f[n - 1] * 25.0 + f[n - 2] * -48.0 + f[n - 3] * 36.0 + f[n - 4] * -16.0 + f[n - 5] * 3.0) *
        s;
    return d;
}

}  // namespace minkenv
