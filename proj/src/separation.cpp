#include "sparsetf/separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "sparsetf/error.hpp"

namespace sparsetf {

namespace {

void require_same_grid(const PhasePair& x, const PhasePair& y) {
    if (!same_grid(x.grid(), y.grid())) throw InvalidInput("phase pairs are on different grids");
}

double integral_product(std::span<const double> x, std::span<const double> y, double dt) {
    std::vector<double> p(x.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = x[i] * y[i];
    return integrate(p, dt);
}

}  // namespace

SeparationReport check_scale_separation(const PhasePair& pair, double eps) {
    const double dt = pair.grid().dt();
    auto th = pair.theta();
    for (std::size_t i = 1; i < th.size(); ++i)
        if (!(th[i] > th[i - 1])) throw InvalidInput("phase must be strictly increasing");
    const auto f = differentiate(th, dt);
    const auto f2 = differentiate(f, dt);
    const auto da = differentiate(pair.a(), dt);

    SeparationReport r;
    double fmin = std::numeric_limits<double>::infinity();
    double fmax = 0.0;
    bool positive = true;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(f[i] > 0.0)) {
            positive = false;
            continue;
        }
        r.eps_envelope = std::max(r.eps_envelope, std::abs(da[i] / f[i]));
        r.eps_frequency = std::max(r.eps_frequency, std::abs(f2[i] / (f[i] * f[i])));
        fmin = std::min(fmin, f[i]);
        fmax = std::max(fmax, f[i]);
    }
    r.m_prime = positive ? fmax / fmin : std::numeric_limits<double>::infinity();
    r.in_dictionary = positive && r.eps_envelope <= eps && r.eps_frequency <= eps;
    return r;
}

PairwiseSeparation check_well_separated(std::span<const PhasePair> pairs, const DictionaryParams& params) {
    if (pairs.size() < 2) throw InvalidInput("well-separatedness needs at least two components");
    for (const auto& p : pairs) require_same_grid(pairs.front(), p);

    PairwiseSeparation out;
    out.order.resize(pairs.size());
    std::iota(out.order.begin(), out.order.end(), 0);
    std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t i, std::size_t j) {
        return pairs[i].mean_frequency() < pairs[j].mean_frequency();
    });

    std::vector<std::vector<double>> freq;
    freq.reserve(pairs.size());
    for (auto idx : out.order) freq.push_back(pairs[idx].frequency());

    const std::size_t m = pairs.size();
    out.ratios.assign(m, std::vector<double>(m, 1.0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            double r = std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < freq[i].size(); ++t) r = std::min(r, freq[j][t] / freq[i][t]);
            out.ratios[i][j] = r;
        }
    out.d_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < m; ++i) out.d_min = std::min(out.d_min, out.ratios[i][i + 1]);
    out.meets_d = out.d_min >= params.d;
    return out;
}

double coherence(const PhasePair& x, const PhasePair& y) {
    require_same_grid(x, y);
    const auto mx = x.mode();
    const auto my = y.mode();
    const double nx = norm(mx);
    const double ny = norm(my);
    if (nx == 0.0 || ny == 0.0) throw InvalidInput("coherence of a zero-norm mode");
    return std::abs(inner_product(mx, my)) / (nx * ny);
}

std::vector<std::string> periodicity_warnings(const PhasePair& pair, double rel_tol) {
    std::vector<std::string> w;
    auto a = pair.a();
    const auto f = pair.frequency();
    const double a_scale = *std::max_element(a.begin(), a.end());
    const double f_scale = *std::max_element(f.begin(), f.end());
    if (std::abs(a.back() - a.front()) > rel_tol * a_scale)
        w.emplace_back("envelope differs at the span endpoints");
    if (std::abs(f.back() - f.front()) > rel_tol * f_scale)
        w.emplace_back("instantaneous frequency differs at the span endpoints");
    const double cycles = (pair.theta().back() - pair.theta().front()) / (2.0 * std::numbers::pi);
    if (std::abs(cycles - std::round(cycles)) > rel_tol * std::max(1.0, cycles))
        w.emplace_back("phase does not advance by a whole number of cycles");
    return w;
}

NormEquivalence verify_norm_equivalence(const PhasePair& pair) {
    NormEquivalence out;
    out.warnings = periodicity_warnings(pair);
    const auto rep = check_scale_separation(pair, 1.0);
    out.epsilon = rep.epsilon();
    const double dt = pair.grid().dt();
    const double a2 = integral_product(pair.a(), pair.a(), dt);
    const auto mode = pair.mode();
    out.mid = inner_product(mode, mode);
    out.lhs = (0.5 - 3.0 * out.epsilon) * a2;
    out.rhs = (0.5 + 3.0 * out.epsilon) * a2;
    out.holds = out.lhs <= out.mid && out.mid <= out.rhs;
    return out;
}

CrossTermBound verify_cross_term_bound(const PhasePair& x, const PhasePair& y) {
    require_same_grid(x, y);
    const auto fx = x.frequency();
    const auto fy = y.frequency();
    CrossTermBound out;
    out.beta = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fx.size(); ++i) out.beta = std::min(out.beta, fy[i] / fx[i]);
    if (!(out.beta > 1.0))
        throw InvalidInput("cross-term bound requires beta = min thetabar'/theta' > 1, measured " +
                           std::to_string(out.beta));
    for (auto& w : periodicity_warnings(x)) out.warnings.push_back("first pair: " + w);
    for (auto& w : periodicity_warnings(y)) out.warnings.push_back("second pair: " + w);

    out.epsilon = std::max(check_scale_separation(x, 1.0).epsilon(), check_scale_separation(y, 1.0).epsilon());
    const double dt = x.grid().dt();
    const double aa = integral_product(x.a(), y.a(), dt);
    out.value = std::abs(inner_product(x.mode(), y.mode()));
    const double q = 1.0 - 1.0 / out.beta;
    out.bound = 4.0 * out.epsilon * (1.0 + 1.0 / (q * q)) * aa;
    out.holds = out.value < out.bound;
    return out;
}

OscillatoryBound verify_oscillatory_integral(double c, int periods, std::span<const double> g) {
    if (periods < 1) throw InvalidInput("oscillatory integral needs at least one whole period");
    if (g.size() < 3) throw InvalidInput("oscillatory integral needs at least 3 samples");
    for (double v : g)
        if (!(v > 0.0)) throw InvalidInput("oscillatory integral weight must be positive");
    const double span = 2.0 * std::numbers::pi * periods;
    const double dt = span / static_cast<double>(g.size() - 1);
    const auto dg = differentiate(g, dt);
    OscillatoryBound out;
    std::vector<double> prod(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        out.epsilon = std::max(out.epsilon, std::abs(dg[i] / g[i]));
        prod[i] = g[i] * std::cos(c + static_cast<double>(i) * dt);
    }
    out.value = std::abs(integrate(prod, dt));
    out.weight = integrate(g, dt);
    out.holds_4eps = out.value <= 4.0 * out.epsilon * out.weight;
    out.holds_2pi_eps = out.value < 2.0 * std::numbers::pi * out.epsilon * out.weight;
    return out;
}

}  // namespace sparsetf
