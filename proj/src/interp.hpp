#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace sparsetf::detail {

// Four-point Lagrange interpolation of samples y on the uniform grid
// x0 + i*h. Outside the grid the end cubic is extrapolated.
template <class T>
T cubic_at(std::span<const T> y, double x0, double h, double x) {
    const auto n = static_cast<long>(y.size());
    if (n == 1) return y[0];
    if (n < 4) {
        const double s = std::clamp((x - x0) / h, 0.0, static_cast<double>(n - 1));
        const long i = std::min(static_cast<long>(s), n - 2);
        const double f = s - static_cast<double>(i);
        return y[i] * (1.0 - f) + y[i + 1] * f;
    }
    const double s = (x - x0) / h;
    long i = static_cast<long>(std::floor(s)) - 1;
    i = std::clamp(i, 0L, n - 4);
    const double u = s - static_cast<double>(i);  // position relative to y[i]
    const double l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    const double l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    const double l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    const double l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    return y[i] * l0 + y[i + 1] * l1 + y[i + 2] * l2 + y[i + 3] * l3;
}

// Unwraps a phase sequence so successive differences lie in (-pi, pi].
inline void unwrap(std::vector<double>& p) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 1; i < p.size(); ++i) {
        double d = p[i] - p[i - 1];
        d -= two_pi * std::round(d / two_pi);
        p[i] = p[i - 1] + d;
    }
}

// Centred moving average with an odd window, shrunk symmetrically at the ends.
inline std::vector<double> moving_average(std::span<const double> x, std::size_t window) {
    if (window <= 1 || x.size() < 3) return {x.begin(), x.end()};
    const long half = static_cast<long>(window / 2);
    const auto n = static_cast<long>(x.size());
    std::vector<double> prefix(x.size() + 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) prefix[i + 1] = prefix[i] + x[i];
    std::vector<double> out(x.size());
    for (long i = 0; i < n; ++i) {
        const long r = std::min({half, i, n - 1 - i});
        out[i] = (prefix[i + r + 1] - prefix[i - r]) / static_cast<double>(2 * r + 1);
    }
    return out;
}

}  // namespace sparsetf::detail
