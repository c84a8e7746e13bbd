#include "sparsetf/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "sparsetf/error.hpp"
#include "sparsetf/separation.hpp"

namespace sparsetf {

namespace {

constexpr double pi = std::numbers::pi;

DictionaryParams measured_params(const std::vector<PhasePair>& pairs, double fallback_d, double epsilon0) {
    DictionaryParams p;
    p.epsilon = 0.0;
    p.m_prime = 1.0;
    for (const auto& pair : pairs) {
        const auto r = check_scale_separation(pair, 1.0);
        p.epsilon = std::max(p.epsilon, r.epsilon());
        p.m_prime = std::max(p.m_prime, r.m_prime);
    }
    p.epsilon = std::clamp(p.epsilon, 1e-12, 1.0 - 1e-12);
    p.d = fallback_d;
    if (pairs.size() >= 2) {
        DictionaryParams probe = p;
        probe.d = 1.0 + 1e-12;
        p.d = std::max(1.0 + 1e-12, check_well_separated(pairs, probe).d_min);
    }
    p.epsilon0 = epsilon0;
    return p;
}

SampledSignal zero_signal(const Grid& g) { return SampledSignal(g, std::vector<double>(g.n, 0.0)); }

}  // namespace

CrossingExample gen_crossing_example(int k, std::size_t n) {
    if (k < 1) throw InvalidInput("crossing example needs k >= 1");
    const auto need = static_cast<std::size_t>(64) * static_cast<std::size_t>(k);
    if (n < need)
        throw InvalidInput("crossing example undersampled: need n >= " + std::to_string(need));
    const Grid g(0.0, 1.0, n);
    const double kk = k;
    std::vector<double> th1(n), th2(n), phi1(n), phi2(n), ones(n, 1.0), f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = g.time(i);
        th1[i] = 6.0 * pi * kk * t + kk * pi;
        th2[i] = 8.0 * pi * kk * t + kk * std::sin(2.0 * pi * t);
        const bool left = t <= 0.5;
        phi1[i] = left ? th1[i] : th2[i];
        phi2[i] = left ? th2[i] : th1[i];
        f[i] = std::cos(th1[i]) + std::cos(th2[i]);
    }
    std::vector<PhasePair> split{PhasePair(g, ones, th1), PhasePair(g, ones, th2)};
    std::vector<PhasePair> swapped{PhasePair(g, ones, phi1), PhasePair(g, ones, phi2)};
    auto split_params = measured_params(split, 4.0 / 3.0, 1e-2);
    auto swapped_params = measured_params(swapped, 4.0 / 3.0, 1e-2);
    return CrossingExample{SampledSignal(g, std::move(f)),
                           GroundTruth{std::move(split), zero_signal(g), split_params},
                           GroundTruth{std::move(swapped), zero_signal(g), swapped_params}};
}

double mode_mixing_theta1(double t) {
    if (t <= 2.0) return 10.0 * pi * t;
    if (t <= 3.0) {
        const double s = t - 2.0;
        return 20.0 * pi + 10.0 * pi * s + 5.0 * pi / 3.0 * s * s * s;
    }
    const double s = t - 4.0;
    if (t <= 4.0) return 50.0 * pi + 20.0 * pi * s - 5.0 * pi / 3.0 * s * s * s;
    return 50.0 * pi + 20.0 * pi * s;
}

ModeMixingExample gen_mode_mixing_example(std::size_t n) {
    if (n < 4096) throw InvalidInput("mode-mixing example undersampled: need n >= 4096");
    const Grid g(0.0, 6.0, n);
    std::vector<double> a1(n), a2(n), th1(n), th2(n), a(n), th(n), f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = g.time(i);
        a1[i] = 2.0 + t;
        a2[i] = 8.0 - t;
        th1[i] = mode_mixing_theta1(t);
        th2[i] = 2.0 * th1[i];
        a[i] = 5.0 + std::abs(t - 3.0);
        th[i] = 20.0 * pi * t;
        f[i] = a1[i] * std::cos(th1[i]) + a2[i] * std::cos(th2[i]);
    }
    std::vector<PhasePair> truth{PhasePair(g, a1, th1), PhasePair(g, a2, th2)};
    auto params = measured_params(truth, 2.0, 1e-2);
    return ModeMixingExample{SampledSignal(g, std::move(f)),
                             GroundTruth{std::move(truth), zero_signal(g), params},
                             PhasePair(g, std::move(a), std::move(th))};
}

namespace {

// Uniform doubles from raw 64-bit draws, so output does not depend on the
// standard library's distribution implementations.
class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : eng_(seed) {}
    double operator()() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double operator()(double lo, double hi) { return lo + (hi - lo) * (*this)(); }
    double normal() {
        const double u1 = std::max((*this)(), 1e-300);
        const double u2 = (*this)();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
    }

private:
    std::mt19937_64 eng_;
};

// c0 + sum_{m=1}^{3} (p_m cos 2 pi m t + q_m sin 2 pi m t)
struct TrigPoly {
    double c0 = 1.0;
    std::array<double, 3> p{}, q{};

    double value(double t) const {
        double v = c0;
        for (int m = 1; m <= 3; ++m) v += p[m - 1] * std::cos(2 * pi * m * t) + q[m - 1] * std::sin(2 * pi * m * t);
        return v;
    }
    double slope(double t) const {
        double v = 0.0;
        for (int m = 1; m <= 3; ++m)
            v += 2 * pi * m * (-p[m - 1] * std::sin(2 * pi * m * t) + q[m - 1] * std::cos(2 * pi * m * t));
        return v;
    }
    // Antiderivative of (value - c0), periodic.
    double primitive(double t) const {
        double v = 0.0;
        for (int m = 1; m <= 3; ++m)
            v += (p[m - 1] * std::sin(2 * pi * m * t) - q[m - 1] * std::cos(2 * pi * m * t)) / (2 * pi * m);
        return v;
    }
};

struct ComponentDraw {
    TrigPoly envelope;    // absolute amplitude
    TrigPoly modulation;  // theta' = 2 pi n * modulation, c0 = 1
    double phase0 = 0.0;
    // Extremes on a fine template grid.
    double env_slope_max = 0.0;
    double mod_min = 1.0, mod_max = 1.0, mod_slope_max = 0.0;
};

ComponentDraw draw_component(Uniform& u, double rho) {
    ComponentDraw c;
    c.envelope.c0 = u(0.5, 2.0);
    for (int m = 1; m <= 3; ++m) {
        c.envelope.p[m - 1] = c.envelope.c0 * u(-0.15, 0.15) / m;
        c.envelope.q[m - 1] = c.envelope.c0 * u(-0.15, 0.15) / m;
        c.modulation.p[m - 1] = u(-rho, rho) / 6.0;
        c.modulation.q[m - 1] = u(-rho, rho) / 6.0;
    }
    c.phase0 = u(0.0, 2.0 * pi);
    c.mod_min = std::numeric_limits<double>::infinity();
    c.mod_max = 0.0;
    constexpr int samples = 4096;
    for (int i = 0; i <= samples; ++i) {
        const double t = static_cast<double>(i) / samples;
        c.env_slope_max = std::max(c.env_slope_max, std::abs(c.envelope.slope(t)));
        const double mv = c.modulation.value(t);
        c.mod_min = std::min(c.mod_min, mv);
        c.mod_max = std::max(c.mod_max, mv);
        c.mod_slope_max = std::max(c.mod_slope_max, std::abs(c.modulation.slope(t)));
    }
    return c;
}

// Smallest cycle count keeping both separation metrics below eps.
int cycles_for_epsilon(const ComponentDraw& c, double eps) {
    const double env = c.env_slope_max / (2 * pi * c.mod_min);
    const double freq = c.mod_slope_max / (2 * pi * c.mod_min * c.mod_min);
    return std::max(1, static_cast<int>(std::ceil(std::max(env, freq) / eps)));
}

}  // namespace

std::pair<SampledSignal, GroundTruth> gen_random_well_separated(int m, double d, double eps_target,
                                                                std::uint64_t seed, std::size_t n,
                                                                const RandomSignalOptions& opts) {
    if (m < 1) throw InvalidInput("random signal needs at least one component");
    if (!(d > 1.0)) throw InvalidInput("random signal needs d > 1");
    if (!(eps_target > 0.0 && eps_target < 0.2)) throw InvalidInput("eps_target must lie in (0, 0.2)");
    if (!(opts.freq_perturbation >= 0.0 && opts.freq_perturbation < 0.5))
        throw InvalidInput("frequency perturbation must lie in [0, 0.5)");
    if (n < 64) throw InvalidInput("random signal needs at least 64 samples");

    Uniform u(seed);
    std::vector<ComponentDraw> draws;
    for (int k = 0; k < m; ++k) draws.push_back(draw_component(u, opts.freq_perturbation));

    const Grid g(0.0, 1.0, n);
    // Margin absorbs the gap between analytic extremes and discrete derivatives.
    double margin = 1.02;
    for (int attempt = 0; attempt < 20; ++attempt, margin *= 1.05) {
        std::vector<int> cycles(m);
        for (int k = 0; k < m; ++k) {
            int need = cycles_for_epsilon(draws[k], eps_target / margin);
            if (k > 0) {
                const double ratio = d * cycles[k - 1] * draws[k - 1].mod_max / draws[k].mod_min;
                need = std::max(need, static_cast<int>(std::ceil(ratio * (1.0 + 1e-9))));
            }
            cycles[k] = need;
        }
        // At least 16 samples per cycle at the highest instantaneous frequency.
        const double top = cycles.back() * draws.back().mod_max;
        const auto required = static_cast<std::size_t>(std::ceil(16.0 * top)) + 1;
        if (required > n)
            throw InvalidInput("random signal infeasible for eps_target=" + std::to_string(eps_target) +
                               ": need n >= " + std::to_string(required));

        std::vector<PhasePair> pairs;
        std::vector<double> f(n, 0.0);
        for (int k = 0; k < m; ++k) {
            std::vector<double> a(n), th(n);
            const double w = 2 * pi * cycles[k];
            for (std::size_t i = 0; i < n; ++i) {
                const double t = g.time(i);
                a[i] = draws[k].envelope.value(t);
                th[i] = draws[k].phase0 + w * (t + draws[k].modulation.primitive(t));
                f[i] += a[i] * std::cos(th[i]);
            }
            pairs.emplace_back(g, std::move(a), std::move(th));
        }
        double eps_hat = 0.0;
        for (const auto& p : pairs) eps_hat = std::max(eps_hat, check_scale_separation(p, 1.0).epsilon());
        if (eps_hat > eps_target) continue;

        std::vector<double> r(n, 0.0);
        if (opts.noise > 0.0) {
            Uniform nu(seed ^ 0x9e3779b97f4a7c15ULL);
            for (std::size_t i = 0; i < n; ++i) {
                r[i] = opts.noise * nu.normal();
                f[i] += r[i];
            }
        }
        const double eps0 = opts.noise > 0.0 ? 3.0 * opts.noise : 1e-2;
        auto params = measured_params(pairs, d, eps0);
        return {SampledSignal(g, std::move(f)),
                GroundTruth{std::move(pairs), SampledSignal(g, std::move(r)), params}};
    }
    throw InvalidInput("random signal could not meet eps_target=" + std::to_string(eps_target) +
                       " on n=" + std::to_string(n));
}

}  // namespace sparsetf
