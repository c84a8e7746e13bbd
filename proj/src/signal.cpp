#include "sparsetf/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sparsetf/error.hpp"

namespace sparsetf {

Grid::Grid(double t0_, double t1_, std::size_t n_) : t0(t0_), t1(t1_), n(n_) {
    if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 > t0))
        throw InvalidInput("grid requires finite t0 < t1");
    if (n < 2) throw InvalidInput("grid requires at least 2 samples");
}

std::vector<double> Grid::times() const {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = time(i);
    t.back() = t1;
    return t;
}

bool same_grid(const Grid& a, const Grid& b) {
    if (a.n != b.n) return false;
    const double tol = 1e-12 * std::max({1.0, std::abs(a.t0), std::abs(a.t1)});
    return std::abs(a.t0 - b.t0) <= tol && std::abs(a.t1 - b.t1) <= tol;
}

namespace {

void require_finite(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw InvalidInput(std::string(what) + " contains non-finite values");
}

void require_same_grid(const Grid& a, const Grid& b) {
    if (!same_grid(a, b)) throw InvalidInput("signals are on different grids");
}

}  // namespace

SampledSignal::SampledSignal(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n)
        throw InvalidInput("signal length " + std::to_string(values_.size()) +
                           " does not match grid size " + std::to_string(grid_.n));
    require_finite(values_, "signal");
}

SampledSignal::SampledSignal(double t0, double t1, std::vector<double> values)
    : SampledSignal(Grid(t0, t1, values.size()), std::move(values)) {}

PhasePair::PhasePair(Grid grid, std::vector<double> a, std::vector<double> theta)
    : grid_(grid), a_(std::move(a)), theta_(std::move(theta)) {
    if (a_.size() != grid_.n || theta_.size() != grid_.n)
        throw InvalidInput("phase pair arrays do not match grid size");
    require_finite(a_, "envelope");
    require_finite(theta_, "phase");
    for (std::size_t i = 0; i < a_.size(); ++i)
        if (!(a_[i] > 0.0))
            throw InvalidInput("envelope must be strictly positive (index " + std::to_string(i) + ")");
    for (std::size_t i = 1; i < theta_.size(); ++i)
        if (!(theta_[i] > theta_[i - 1]))
            throw InvalidInput("phase must be strictly increasing (index " + std::to_string(i) + ")");
}

std::vector<double> PhasePair::frequency() const { return differentiate(theta_, grid_.dt()); }

double PhasePair::mean_frequency() const {
    return (theta_.back() - theta_.front()) / grid_.span();
}

SampledSignal PhasePair::mode() const {
    std::vector<double> v(a_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a_[i] * std::cos(theta_[i]);
    return SampledSignal(grid_, std::move(v));
}

std::vector<double> differentiate(std::span<const double> x, double dt) {
    const std::size_t n = x.size();
    if (n < 3) throw InvalidInput("differentiate needs at least 3 samples");
    if (!(dt > 0.0)) throw InvalidInput("differentiate needs a positive time step");
    std::vector<double> d(n);
    const double h2 = 2.0 * dt;
    d[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / h2;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i - 1]) / h2;
    d[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / h2;
    return d;
}

std::vector<double> cumulative_integrate(std::span<const double> x, double dt) {
    std::vector<double> c(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) c[i] = c[i - 1] + 0.5 * dt * (x[i - 1] + x[i]);
    return c;
}

double integrate(std::span<const double> x, double dt) {
    if (x.size() < 2) return 0.0;
    double s = 0.5 * (x.front() + x.back());
    for (std::size_t i = 1; i + 1 < x.size(); ++i) s += x[i];
    return s * dt;
}

double inner_product(const SampledSignal& x, const SampledSignal& y) {
    require_same_grid(x.grid(), y.grid());
    std::vector<double> p(x.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = x[i] * y[i];
    return integrate(p, x.grid().dt());
}

double norm(const SampledSignal& x) { return std::sqrt(std::max(0.0, inner_product(x, x))); }

double rms(const SampledSignal& x) { return norm(x) / std::sqrt(x.grid().span()); }

SampledSignal reconstruct(std::span<const PhasePair> pairs) {
    if (pairs.empty()) throw InvalidInput("reconstruct needs at least one component");
    const Grid& g = pairs.front().grid();
    std::vector<double> v(g.n, 0.0);
    for (const auto& p : pairs) {
        require_same_grid(g, p.grid());
        auto a = p.a();
        auto th = p.theta();
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += a[i] * std::cos(th[i]);
    }
    return SampledSignal(g, std::move(v));
}

SampledSignal operator+(const SampledSignal& x, const SampledSignal& y) {
    require_same_grid(x.grid(), y.grid());
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = x[i] + y[i];
    return SampledSignal(x.grid(), std::move(v));
}

SampledSignal operator-(const SampledSignal& x, const SampledSignal& y) {
    require_same_grid(x.grid(), y.grid());
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = x[i] - y[i];
    return SampledSignal(x.grid(), std::move(v));
}

SampledSignal operator*(double c, const SampledSignal& x) {
    std::vector<double> v(x.values().begin(), x.values().end());
    for (double& e : v) e *= c;
    return SampledSignal(x.grid(), std::move(v));
}

}  // namespace sparsetf
