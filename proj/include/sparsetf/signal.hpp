#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sparsetf {

/// Uniform time grid t_i = t0 + i*(t1 - t0)/(n - 1), both endpoints included.
struct Grid {
    double t0 = 0.0;
    double t1 = 1.0;
    std::size_t n = 2;

    Grid() = default;
    Grid(double t0, double t1, std::size_t n);

    double dt() const { return (t1 - t0) / static_cast<double>(n - 1); }
    double span() const { return t1 - t0; }
    double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt(); }
    std::vector<double> times() const;

    bool operator==(const Grid&) const = default;
};

// Two grids are interchangeable when their endpoints agree to round-off.
bool same_grid(const Grid& a, const Grid& b);

/// Real-valued signal on a uniform grid. All values are finite.
class SampledSignal {
public:
    SampledSignal(Grid grid, std::vector<double> values);
    SampledSignal(double t0, double t1, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Envelope/phase pair (a, theta) of a single intrinsic mode a(t) cos theta(t).
/// The phase is stored unwrapped and must be strictly increasing; the envelope
/// must be strictly positive.
class PhasePair {
public:
    PhasePair(Grid grid, std::vector<double> a, std::vector<double> theta);

    const Grid& grid() const { return grid_; }
    std::span<const double> a() const { return a_; }
    std::span<const double> theta() const { return theta_; }
    std::size_t size() const { return a_.size(); }

    // theta' by discrete differentiation.
    std::vector<double> frequency() const;
    double mean_frequency() const;
    // a(t) cos theta(t) on the grid.
    SampledSignal mode() const;

private:
    Grid grid_;
    std::vector<double> a_;
    std::vector<double> theta_;
};

/// Central differences in the interior, second-order one-sided at the ends.
std::vector<double> differentiate(std::span<const double> x, double dt);

/// Cumulative trapezoidal integral starting at zero.
std::vector<double> cumulative_integrate(std::span<const double> x, double dt);

/// Composite trapezoidal rule over the whole grid.
double integrate(std::span<const double> x, double dt);

double inner_product(const SampledSignal& x, const SampledSignal& y);
double norm(const SampledSignal& x);
// sqrt(integral(x^2) / span): the residual measure compared against epsilon0.
double rms(const SampledSignal& x);

SampledSignal reconstruct(std::span<const PhasePair> pairs);

SampledSignal operator+(const SampledSignal& x, const SampledSignal& y);
SampledSignal operator-(const SampledSignal& x, const SampledSignal& y);
SampledSignal operator*(double c, const SampledSignal& x);

}  // namespace sparsetf
