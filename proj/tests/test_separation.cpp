#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "sparsetf/error.hpp"
#include "sparsetf/separation.hpp"
#include "sparsetf/synth.hpp"

using namespace sparsetf;
using std::numbers::pi;

namespace {

PhasePair make_pair(const Grid& g, auto a, auto th) {
    std::vector<double> av(g.n), tv(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        av[i] = a(g.time(i));
        tv[i] = th(g.time(i));
    }
    return PhasePair(g, av, tv);
}

PhasePair tone(const Grid& g, double cycles, double amp = 1.0) {
    return make_pair(g, [amp](double) { return amp; }, [cycles](double t) { return 2 * pi * cycles * t; });
}

PhasePair scaled(const PhasePair& p, double c) {
    std::vector<double> a(p.a().begin(), p.a().end());
    for (double& v : a) v *= c;
    return PhasePair(p.grid(), a, std::vector<double>(p.theta().begin(), p.theta().end()));
}

}  // namespace

TEST_CASE("a pure tone has zero separation factor") {
    Grid g(0.0, 1.0, 4096);
    auto r = check_scale_separation(tone(g, 100), 0.01);
    CHECK(r.eps_envelope == 0.0);
    CHECK(r.eps_frequency < 1e-10);
    CHECK(r.m_prime == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.in_dictionary);
}

TEST_CASE("mode-mixing components meet their stated separation factors") {
    auto ex = gen_mode_mixing_example(1u << 15);
    const double grid_err = 1e-4;
    auto r1 = check_scale_separation(ex.truth.pairs[0], 1 / (10 * pi));
    auto r2 = check_scale_separation(ex.truth.pairs[1], 1 / (20 * pi));
    CHECK(r1.eps_envelope <= 1 / (10 * pi) + grid_err);
    CHECK(r1.eps_frequency <= 1 / (10 * pi) + grid_err);
    CHECK(r2.eps_envelope <= 1 / (20 * pi) + grid_err);
    CHECK(r2.eps_frequency <= 1 / (20 * pi) + grid_err);
    CHECK(r1.m_prime == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("phase that decreases is rejected") {
    Grid g(0, 1, 16);
    auto p = tone(g, 3);
    std::vector<double> a(16, 1.0), th(p.theta().begin(), p.theta().end());
    CHECK_NOTHROW(check_scale_separation(p, 0.1));
    // PhasePair itself refuses non-monotone phase, so the check cannot be reached with one.
    th[7] = th[6] - 0.1;
    CHECK_THROWS_AS(PhasePair(g, a, th), InvalidInput);
}

TEST_CASE("well-separatedness of constant tones") {
    Grid g(0.0, 1.0, 4096);
    DictionaryParams params;
    params.d = 2.0;
    auto s = check_well_separated(std::vector{tone(g, 100), tone(g, 50)}, params);
    CHECK(s.d_min == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.meets_d);
    CHECK(s.order == std::vector<std::size_t>{1, 0});
}

TEST_CASE("mode-mixing pairs have d_min = 2") {
    auto ex = gen_mode_mixing_example(1u << 14);
    auto s = check_well_separated(ex.truth.pairs, DictionaryParams{});
    CHECK(s.d_min == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("crossing pairs have d_min = 1") {
    auto ex = gen_crossing_example(32, 1u << 14);
    DictionaryParams params;
    params.d = 4.0 / 3.0;
    auto s = check_well_separated(ex.split.pairs, params);
    CHECK(s.d_min == doctest::Approx(1.0).epsilon(1e-3));
    CHECK_FALSE(s.meets_d);
}

TEST_CASE("well-separatedness needs two pairs on one grid") {
    Grid g(0, 1, 256);
    CHECK_THROWS_AS(check_well_separated(std::vector{tone(g, 5)}, DictionaryParams{}), InvalidInput);
    CHECK_THROWS_AS(check_well_separated(std::vector{tone(g, 5), tone(Grid(0, 2, 256), 9)}, DictionaryParams{}),
                    InvalidInput);
}

TEST_CASE("coherence basics") {
    Grid g(0.0, 1.0, 8192);
    auto x = make_pair(g, [](double t) { return 2 + std::sin(2 * pi * t); }, [](double t) { return 2 * pi * 40 * t; });
    CHECK(coherence(x, x) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(coherence(tone(g, 32), tone(g, 64)) <= 1e-6);
    auto y = tone(g, 97, 0.7);
    CHECK(coherence(x, y) == doctest::Approx(coherence(y, x)).epsilon(1e-14));
    CHECK(coherence(scaled(x, 3.5), y) == doctest::Approx(coherence(x, y)).epsilon(1e-12));
}

TEST_CASE("mode-mixing coherence is below the coherence bound") {
    auto ex = gen_mode_mixing_example(1u << 15);
    const auto& p = ex.truth.pairs;
    const double eps = 1 / (10 * pi);
    const double dt = p[0].grid().dt();
    std::vector<double> prod(p[0].size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = p[0].a()[i] * p[1].a()[i];
    const double cross = integrate(prod, dt);
    // integral of (2 + t)(8 - t) over [0, 6] is 96 + 108 - 72.
    CHECK(cross == doctest::Approx(132.0).epsilon(1e-6));
    auto norm_a = [&](const PhasePair& q) {
        std::vector<double> sq(q.size());
        for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = q.a()[i] * q.a()[i];
        return std::sqrt(integrate(sq, dt));
    };
    const double bound = 4 * eps / (0.5 - 3 * eps) * (1 + 1 / std::pow(1 - 0.5, 2)) * cross / (norm_a(p[0]) * norm_a(p[1]));
    CHECK(coherence(p[0], p[1]) <= bound);
}

TEST_CASE("norm equivalence: equality for a pure tone") {
    Grid g(0.0, 1.0, 4097);
    auto n = verify_norm_equivalence(tone(g, 16));
    CHECK(n.mid == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(n.lhs == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(n.rhs == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(n.warnings.empty());
}

TEST_CASE("norm equivalence: modulated tone") {
    Grid g(0.0, 1.0, 8193);
    auto p = make_pair(g, [](double t) { return 2 + std::sin(2 * pi * t); },
                       [](double t) { return 2 * pi * 64 * t + 0.3 * std::sin(2 * pi * t); });
    auto n = verify_norm_equivalence(p);
    // Independent quadrature of the three quantities.
    double aa = 0, mid = 0;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double w = (i == 0 || i + 1 == g.n) ? 0.5 : 1.0;
        aa += w * p.a()[i] * p.a()[i];
        mid += w * std::pow(p.a()[i] * std::cos(p.theta()[i]), 2);
    }
    aa *= g.dt();
    mid *= g.dt();
    CHECK(n.mid == doctest::Approx(mid).epsilon(1e-12));
    CHECK(n.lhs == doctest::Approx((0.5 - 3 * n.epsilon) * aa).epsilon(1e-12));
    CHECK(n.holds);
}

TEST_CASE("norm equivalence: crossing example's second phase") {
    auto ex = gen_crossing_example(32, 1u << 14);
    auto n = verify_norm_equivalence(ex.split.pairs[1]);
    CHECK(n.holds);
    auto r = check_scale_separation(ex.split.pairs[1], 1.0);
    CHECK(r.eps_frequency <= 1.0 / (9 * 32) + 1e-4);
}

TEST_CASE("norm equivalence warns on non-periodic pairs") {
    Grid g(0.0, 1.0, 2049);
    auto p = make_pair(g, [](double t) { return 1 + t; }, [](double t) { return 2 * pi * 20.5 * t; });
    auto n = verify_norm_equivalence(p);
    CHECK_FALSE(n.warnings.empty());
}

TEST_CASE("cross term bound for orthogonal tones") {
    Grid g(0.0, 1.0, 4097);
    auto c = verify_cross_term_bound(tone(g, 32), tone(g, 64));
    CHECK(c.value < 1e-9);
    CHECK(c.beta == doctest::Approx(2.0));
    CHECK(c.holds);
}

TEST_CASE("cross term bound for the mode-mixing pair") {
    auto ex = gen_mode_mixing_example(1u << 15);
    auto c = verify_cross_term_bound(ex.truth.pairs[0], ex.truth.pairs[1]);
    CHECK(c.beta == doctest::Approx(2.0).epsilon(1e-9));
    const double expected = 4 * c.epsilon * (1 + 1 / std::pow(1 - 1 / c.beta, 2)) * 132.0;
    CHECK(c.bound == doctest::Approx(expected).epsilon(1e-5));
    CHECK(c.holds);
}

TEST_CASE("cross term bound names the violated hypothesis") {
    Grid g(0.0, 1.0, 1025);
    CHECK_THROWS_AS(verify_cross_term_bound(tone(g, 64), tone(g, 32)), InvalidInput);
    CHECK_THROWS_AS(verify_cross_term_bound(tone(g, 32), tone(g, 32)), InvalidInput);
}

TEST_CASE("cross term bound holds on random separated pairs") {
    int violations = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const double d = 1.5 + 0.5 * static_cast<double>(seed % 4);
        auto [f, gt] = gen_random_well_separated(2, d, 0.02 + 0.001 * static_cast<double>(seed % 50), seed, 4096);
        auto c = verify_cross_term_bound(gt.pairs[0], gt.pairs[1]);
        if (!c.holds) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("coherence shrinks like eps as the carriers speed up") {
    std::vector<double> eps, mu;
    for (double k : {20.0, 40.0, 80.0}) {
        Grid g(0.0, 1.0, 16385);
        auto x = make_pair(g, [](double t) { return 2 + std::cos(2 * pi * t); },
                           [k](double t) { return 2 * pi * k * t + 2 * std::sin(2 * pi * t); });
        auto y = make_pair(g, [](double t) { return 1.5 + std::sin(2 * pi * t); },
                           [k](double t) { return 2 * pi * 2.5 * k * t; });
        eps.push_back(std::max(check_scale_separation(x, 1).epsilon(), check_scale_separation(y, 1).epsilon()));
        mu.push_back(coherence(x, y));
    }
    CHECK(mu[2] < mu[0]);
    CHECK(mu[2] / eps[2] <= 2 * mu[0] / eps[0]);
}

TEST_CASE("oscillatory integral against both constants") {
    const int periods = 5;
    const std::size_t n = 5001;
    std::vector<double> g(n);
    const double c = 0.3, span = 2 * pi * periods, dt = span / (n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(0.02 * (c + i * dt));
    auto r = verify_oscillatory_integral(c, periods, g);
    CHECK(r.epsilon == doctest::Approx(0.02).epsilon(1e-3));
    // Closed form of the exponential-weighted cosine integral.
    auto prim = [](double x) { return std::exp(0.02 * x) * (0.02 * std::cos(x) + std::sin(x)) / (1 + 0.0004); };
    CHECK(r.value == doctest::Approx(std::abs(prim(c + span) - prim(c))).epsilon(1e-4));
    CHECK(r.holds_4eps);
    CHECK(r.holds_2pi_eps);
}

TEST_CASE("oscillatory integral rejects bad weights") {
    std::vector<double> g(100, 1.0);
    g[10] = 0.0;
    CHECK_THROWS_AS(verify_oscillatory_integral(0.0, 2, g), InvalidInput);
    std::vector<double> ok(100, 1.0);
    CHECK_THROWS_AS(verify_oscillatory_integral(0.0, 0, ok), InvalidInput);
}
