#include "sparsetf/pursuit.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>

#include "fft.hpp"
#include "interp.hpp"
#include "sparsetf/error.hpp"
#include "sparsetf/ridge.hpp"
#include "sparsetf/separation.hpp"

namespace sparsetf {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
using detail::cplx;

void check_increasing(std::span<const double> theta, const char* what) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!std::isfinite(theta[i])) throw InvalidInput(std::string(what) + ": non-finite phase");
        if (i > 0 && !(theta[i] > theta[i - 1]))
            throw InvalidInput(std::string(what) + ": phase must be strictly increasing (index " +
                               std::to_string(i) + ")");
    }
}

// Low-pass of samples on a uniform grid of step du, using the even extension:
// raised-cosine edge from eta (1 - rolloff) to eta (1 + rolloff).
constexpr double rolloff = 0.6;
void lowpass(std::vector<cplx>& x, double du, double eta) {
    const std::size_t len = x.size();
    const std::size_t m = 2 * len - 2;
    std::vector<cplx> ext(m);
    for (std::size_t j = 0; j < len; ++j) ext[j] = x[j];
    for (std::size_t j = len; j < m; ++j) ext[j] = x[m - j];
    const auto fft = detail::cached_fft(m);
    fft->forward(ext);
    const double period = static_cast<double>(m) * du;
    const double lo = eta * (1.0 - rolloff);
    const double hi = eta * (1.0 + rolloff);
    for (std::size_t b = 0; b < m; ++b) {
        const double nu = std::abs(detail::bin_frequency(b, m, period));
        if (nu >= hi) ext[b] = 0.0;
        else if (nu > lo) ext[b] *= 0.5 * (1.0 + std::cos(std::numbers::pi * (nu - lo) / (hi - lo)));
    }
    fft->backward(ext);
    for (std::size_t j = 0; j < len; ++j) x[j] = ext[j] / static_cast<double>(m);
}

// Least-squares cubic c0 + c1 x + c2 x^2 + c3 x^3 through y, x uniform on [-1, 1].
std::array<cplx, 4> cubic_fit(const std::vector<cplx>& y) {
    const std::size_t len = y.size();
    std::array<std::array<double, 4>, 4> g{};
    std::array<cplx, 4> b{};
    for (std::size_t j = 0; j < len; ++j) {
        const double x = len > 1 ? 2.0 * static_cast<double>(j) / static_cast<double>(len - 1) - 1.0 : 0.0;
        const std::array<double, 4> p{1.0, x, x * x, x * x * x};
        for (int r = 0; r < 4; ++r) {
            b[r] += p[r] * y[j];
            for (int c = 0; c < 4; ++c) g[r][c] += p[r] * p[c];
        }
    }
    for (int c = 0; c < 4; ++c) {
        int piv = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::abs(g[r][c]) > std::abs(g[piv][c])) piv = r;
        std::swap(g[c], g[piv]);
        std::swap(b[c], b[piv]);
        if (std::abs(g[c][c]) < 1e-300) return {};
        for (int r = c + 1; r < 4; ++r) {
            const double f = g[r][c] / g[c][c];
            for (int k = c; k < 4; ++k) g[r][k] -= f * g[c][k];
            b[r] -= f * b[c];
        }
    }
    std::array<cplx, 4> x{};
    for (int r = 3; r >= 0; --r) {
        cplx acc = b[r];
        for (int k = r + 1; k < 4; ++k) acc -= g[r][k] * x[k];
        x[r] = acc / g[r][r];
    }
    return x;
}

// Low-passed 2 r e^{i theta}, evaluated back on the time grid. The signal is
// resampled on a uniform grid in u = theta and cut off at angular frequency
// eta in u. Periodic signals are first extended by half a span on each side,
// the phase advancing by theta(t1) - theta(t0) per period, and the outer half
// of each extension is tapered to zero. The mean
// drift of the demodulated phase is removed before filtering so the even
// extension stays close to smooth.
std::vector<cplx> demodulate(const SampledSignal& r, std::span<const double> theta, double eta, Boundary boundary) {
    const std::size_t n = r.size();
    const double dt = r.grid().dt();
    const auto rv = r.values();

    const long per = static_cast<long>(n - 1);
    const long pad = boundary == Boundary::periodic ? per / 2 : 0;
    const double advance = theta.back() - theta.front();
    std::vector<double> rx, tx;
    rx.reserve(n + 2 * static_cast<std::size_t>(pad));
    tx.reserve(rx.capacity());
    for (long j = -pad; j < static_cast<long>(n) + pad; ++j) {
        const long q = j >= 0 ? j / per : -((-j + per - 1) / per);
        const long idx = j - q * per;
        rx.push_back(rv[static_cast<std::size_t>(idx)]);
        tx.push_back(theta[static_cast<std::size_t>(idx)] + static_cast<double>(q) * advance);
    }
    // Sample n - 1 and sample 0 of the next period coincide.
    for (std::size_t i = 0; i < tx.size(); ++i) {
        const long j = static_cast<long>(i) - pad;
        if (j >= 0 && j < static_cast<long>(n)) tx[i] = theta[static_cast<std::size_t>(j)], rx[i] = rv[static_cast<std::size_t>(j)];
    }
    const std::size_t nx = tx.size();
    const double tx0 = r.grid().t0 - static_cast<double>(pad) * dt;

    const double u0 = tx.front();
    const double u1 = tx.back();
    double min_step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < nx; ++i) min_step = std::min(min_step, tx[i] - tx[i - 1]);
    const double want = std::ceil((u1 - u0) / min_step) + 1.0;
    auto len = static_cast<std::size_t>(std::clamp(want, static_cast<double>(nx), 4.0 * static_cast<double>(nx)));
    // Even extension has length 2 len - 2.
    len = detail::next_smooth(len - 1) + 1;
    const double du = (u1 - u0) / static_cast<double>(len - 1);

    std::vector<cplx> prod(len);
    std::size_t k = 0;
    for (std::size_t j = 0; j < len; ++j) {
        const double u = j + 1 == len ? u1 : u0 + static_cast<double>(j) * du;
        while (k + 2 < nx && tx[k + 1] < u) ++k;
        const double frac = std::clamp((u - tx[k]) / (tx[k + 1] - tx[k]), 0.0, 1.0);
        const double t = tx0 + (static_cast<double>(k) + frac) * dt;
        const double rt = detail::cubic_at<double>(rx, tx0, dt, t);
        prod[j] = 2.0 * rt * cplx(std::cos(u), std::sin(u));
    }

    // Mean phase drift of the low-passed product over its central 80%.
    std::vector<cplx> probe = prod;
    lowpass(probe, du, eta);
    const std::size_t j1 = len / 10;
    const std::size_t j2 = len - 1 - len / 10;
    std::vector<double> ph(j2 - j1 + 1);
    for (std::size_t j = j1; j <= j2; ++j) ph[j - j1] = std::arg(probe[j]);
    detail::unwrap(ph);
    const double slope = j2 > j1 ? (ph.back() - ph.front()) / (static_cast<double>(j2 - j1) * du) : 0.0;
    const double umid = 0.5 * (u0 + u1);
    auto tilt = [&](double sign) {
        for (std::size_t j = 0; j < len; ++j) {
            const double u = u0 + static_cast<double>(j) * du;
            prod[j] *= std::polar(1.0, sign * slope * (u - umid));
        }
    };
    tilt(-1.0);
    if (pad > 0) {
        const double half = 0.5 * static_cast<double>(pad) * dt;
        const double inner0 = r.grid().t0 - half;
        const double inner1 = r.grid().t1 + half;
        std::size_t kk = 0;
        for (std::size_t j = 0; j < len; ++j) {
            const double u = u0 + static_cast<double>(j) * du;
            while (kk + 2 < nx && tx[kk + 1] < u) ++kk;
            const double t = tx0 + (static_cast<double>(kk) + std::clamp((u - tx[kk]) / (tx[kk + 1] - tx[kk]), 0.0, 1.0)) * dt;
            const double out = std::max(inner0 - t, t - inner1);
            if (out > 0.0) {
                const double c = std::cos(0.5 * std::numbers::pi * std::min(out / half, 1.0));
                prod[j] *= c * c;
            }
        }
    }
    // Without padding the even extension has a kink wherever the envelope has
    // slope at an end; filter only what a least-squares cubic leaves over.
    std::array<cplx, 4> trend{};
    if (pad == 0) trend = cubic_fit(prod);
    auto add_trend = [&](double sign) {
        for (std::size_t j = 0; j < len; ++j) {
            const double x = 2.0 * static_cast<double>(j) / static_cast<double>(len - 1) - 1.0;
            prod[j] += sign * (trend[0] + x * (trend[1] + x * (trend[2] + x * trend[3])));
        }
    };
    add_trend(-1.0);
    lowpass(prod, du, eta);
    add_trend(1.0);
    tilt(1.0);

    std::span<const cplx> zu(prod.data(), len);
    std::vector<cplx> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = detail::cubic_at<cplx>(zu, u0, du, theta[i]);
    return z;
}

struct Iterate {
    std::vector<double> theta;
    std::vector<double> a;
    std::vector<double> correction;  // phase correction to add to theta
    double objective = 0.0;
};

Iterate evaluate(const SampledSignal& r, std::vector<double> theta, double eta, double a_floor, Boundary boundary) {
    Iterate it;
    const auto z = demodulate(r, theta, eta, boundary);
    const std::size_t n = z.size();
    it.a.resize(n);
    it.correction.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        it.a[i] = std::max(z[i].real(), a_floor);
        it.correction[i] = std::arg(z[i]);
    }
    detail::unwrap(it.correction);
    const std::size_t mid = n / 2;
    const double shift = two_pi * std::round(it.correction[mid] / two_pi);
    for (double& c : it.correction) c = -(c - shift);

    const double dt = r.grid().dt();
    std::vector<double> diff(n);
    const auto rv = r.values();
    for (std::size_t i = 0; i < n; ++i) diff[i] = rv[i] - it.a[i] * std::cos(theta[i]);
    for (double& v : diff) v *= v;
    it.objective = integrate(diff, dt);
    it.theta = std::move(theta);
    return it;
}

// theta + step * correction with theta' clamped to at least `floor`.
std::vector<double> update_phase(const std::vector<double>& theta, const std::vector<double>& correction, double step,
                                 double floor, double dt) {
    const std::size_t n = theta.size();
    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i) next[i] = theta[i] + step * correction[i];
    bool clamp = false;
    for (std::size_t i = 1; i < n && !clamp; ++i)
        if (next[i] - next[i - 1] < floor * dt) clamp = true;
    if (!clamp) return next;
    auto freq = differentiate(next, dt);
    for (double& f : freq) f = std::max(f, floor);
    auto integ = cumulative_integrate(freq, dt);
    const std::size_t mid = n / 2;
    const double anchor = next[mid] - integ[mid];
    for (std::size_t i = 0; i < n; ++i) next[i] = integ[i] + anchor;
    return next;
}

double min_frequency(std::span<const double> theta, double dt) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < theta.size(); ++i) m = std::min(m, (theta[i] - theta[i - 1]) / dt);
    return m;
}

void enforce_increasing(std::vector<double>& theta) {
    for (std::size_t i = 1; i < theta.size(); ++i)
        if (!(theta[i] > theta[i - 1]))
            theta[i] = std::nextafter(theta[i - 1], std::numeric_limits<double>::infinity());
}

SampledSignal slice(const SampledSignal& s, std::size_t lo, std::size_t hi) {
    const auto v = s.values();
    return SampledSignal(Grid(s.grid().time(lo), s.grid().time(hi), hi - lo + 1),
                         std::vector<double>(v.begin() + static_cast<long>(lo), v.begin() + static_cast<long>(hi) + 1));
}

RecoveryOptions recovery_options(const PursuitConfig& cfg) {
    RecoveryOptions o;
    o.floor = cfg.ridge_floor;
    o.voices = cfg.voices;
    o.boundary = cfg.boundary;
    return o;
}

// Index of the most energetic ridge; ties go to the lower frequency.
std::optional<std::size_t> dominant(const std::vector<RidgeCurve>& ridges) {
    std::optional<std::size_t> best;
    double best_e = 0.0;
    for (std::size_t i = 0; i < ridges.size(); ++i) {
        const double e = ridges[i].energy();
        if (!best || e > best_e * (1.0 + 1e-9)) {
            best = i;
            best_e = e;
        } else if (e >= best_e * (1.0 - 1e-9) && ridges[i].mean_frequency() < ridges[*best].mean_frequency()) {
            best = i;
        }
    }
    return best;
}

}  // namespace

void PursuitConfig::validate() const {
    params.validate();
    if (max_components < 1) throw InvalidInput("max_components must be at least 1");
    if (inner_max_iter < 1) throw InvalidInput("inner_max_iter must be at least 1");
    if (!(inner_tol > 0.0)) throw InvalidInput("inner_tol must be positive");
    if (lowpass_fraction && !(*lowpass_fraction > 0.0 && *lowpass_fraction < 1.0))
        throw InvalidInput("lowpass_fraction must lie in (0, 1)");
    if (refine_sweeps < 0) throw InvalidInput("refine_sweeps must be non-negative");
    if (!(membership_slack >= 1.0)) throw InvalidInput("membership_slack must be at least 1");
    if (voices < 1) throw InvalidInput("voices must be at least 1");
    if (delta && !(*delta > 0.0 && *delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
    if (ridge_floor && !(*ridge_floor > 0.0 && *ridge_floor < 1.0)) throw InvalidInput("ridge_floor must lie in (0, 1)");
    if (init == PursuitInit::user && user_phases.empty()) throw InvalidInput("user init requires at least one phase");
}

double PursuitConfig::wavelet_delta() const {
    if (delta) return *delta;
    return std::min(0.5, 0.8 * (params.d - 1.0) / (params.d + 1.0));
}

double PursuitConfig::cutoff() const {
    if (lowpass_fraction) return *lowpass_fraction;
    return std::min(0.5, 0.5 * (1.0 - 1.0 / params.d));
}

double p2_objective(const SampledSignal& f, const PhasePair& pair) {
    if (!same_grid(f.grid(), pair.grid())) throw InvalidInput("p2_objective: grid mismatch");
    const auto v = f.values();
    const auto a = pair.a();
    const auto th = pair.theta();
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double e = v[i] - a[i] * std::cos(th[i]);
        sq[i] = e * e;
    }
    return integrate(sq, f.grid().dt());
}

P2Result solve_p2(const SampledSignal& r, std::span<const double> theta_init, const PursuitConfig& cfg) {
    if (theta_init.size() != r.size()) throw InvalidInput("solve_p2: initial phase length does not match the grid");
    if (r.size() < 4) throw InvalidInput("solve_p2: need at least 4 samples");
    check_increasing(theta_init, "solve_p2");
    const double dt = r.grid().dt();
    double sup = 0.0;
    for (double v : r.values()) sup = std::max(sup, std::abs(v));
    const double a_floor = std::max(1e-12 * sup, DBL_MIN);
    const double eta = cfg.cutoff();
    const double delta = cfg.wavelet_delta();

    Iterate cur = evaluate(r, std::vector<double>(theta_init.begin(), theta_init.end()), eta, a_floor, cfg.boundary);
    P2Result res{PhasePair(r.grid(), cur.a, cur.theta), cur.objective, 0, false, {cur.objective}};
    if (sup == 0.0) {
        res.converged = true;
        return res;
    }
    for (int iter = 0; iter < cfg.inner_max_iter; ++iter) {
        double largest = 0.0;
        for (double c : cur.correction) largest = std::max(largest, std::abs(c));
        if (largest / two_pi < cfg.inner_tol) {
            res.converged = true;
            break;
        }
        const double floor = (1.0 - delta) * min_frequency(cur.theta, dt);
        bool accepted = false;
        for (double step : {1.0, 0.5}) {
            auto theta = update_phase(cur.theta, cur.correction, step, floor, dt);
            enforce_increasing(theta);
            Iterate next = evaluate(r, std::move(theta), eta, a_floor, cfg.boundary);
            if (next.objective <= cur.objective * (1.0 + 1e-12) + 1e-300) {
                cur = std::move(next);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;  // objective rose twice in a row: keep the best iterate
        res.iterations = iter + 1;
        res.history.push_back(cur.objective);
        // stalled: under 1e-6 relative decrease over the last five iterates
        const std::size_t h = res.history.size();
        if (h > 5 && res.history[h - 6] - cur.objective <= 1e-6 * res.history[h - 6]) break;
    }
    res.pair = PhasePair(r.grid(), cur.a, cur.theta);
    res.objective = cur.objective;
    return res;
}

std::vector<std::size_t> partition_domain(const std::vector<std::vector<double>>& theta_primes, double d) {
    if (!(d > 1.0)) throw InvalidInput("partition_domain: d must exceed 1");
    if (theta_primes.empty()) return {};
    const std::size_t n = theta_primes.front().size();
    for (const auto& p : theta_primes) {
        if (p.size() != n) throw InvalidInput("partition_domain: profiles differ in length");
        for (double v : p)
            if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput("partition_domain: theta' must be positive");
    }
    const double limit = std::sqrt(d);
    std::vector<double> hi(theta_primes.size()), lo(theta_primes.size());
    std::vector<std::size_t> breaks;
    for (std::size_t i = 0; i < n; ++i) {
        bool cut = false;
        for (std::size_t k = 0; k < theta_primes.size() && i > 0; ++k) {
            const double v = theta_primes[k][i];
            if (std::max(hi[k], v) / std::min(lo[k], v) >= limit) cut = true;
        }
        if (i == 0 || cut) {
            if (cut) breaks.push_back(i);
            for (std::size_t k = 0; k < theta_primes.size(); ++k) hi[k] = lo[k] = theta_primes[k][i];
        } else {
            for (std::size_t k = 0; k < theta_primes.size(); ++k) {
                hi[k] = std::max(hi[k], theta_primes[k][i]);
                lo[k] = std::min(lo[k], theta_primes[k][i]);
            }
        }
    }
    return breaks;
}

std::vector<std::size_t> partition_domain(std::span<const double> theta_prime, double d) {
    return partition_domain(std::vector<std::vector<double>>{{theta_prime.begin(), theta_prime.end()}}, d);
}

P2Result refine_by_segments(const SampledSignal& r, const PhasePair& pair, std::span<const std::size_t> breakpoints,
                            const PursuitConfig& cfg) {
    if (!same_grid(r.grid(), pair.grid())) throw InvalidInput("refine_by_segments: grid mismatch");
    const std::size_t n = r.size();
    std::vector<std::size_t> edges{0};
    for (std::size_t b : breakpoints)
        if (b > edges.back() + 1 && b + 2 < n) edges.push_back(b);
    edges.push_back(n - 1);
    const std::size_t nseg = edges.size() - 1;

    const auto base_a = pair.a();
    const auto base_th = pair.theta();
    const auto freq = pair.frequency();
    const double dt = r.grid().dt();
    const BSplineWavelet w(cfg.wavelet_delta());

    // Half-width of the blend around each interior edge: three carrier
    // periods, at most half of either neighbouring segment.
    std::vector<std::size_t> margin(edges.size(), 0);
    for (std::size_t e = 1; e < nseg; ++e) {
        const double period = two_pi / (freq[edges[e]] * dt);
        const std::size_t want = std::max<std::size_t>(8, static_cast<std::size_t>(3.0 * period));
        margin[e] = std::min({want, (edges[e] - edges[e - 1]) / 2, (edges[e + 1] - edges[e]) / 2});
    }

    std::vector<double> a(n, 0.0), th(n, 0.0), wsum(n, 0.0);
    std::vector<double> prev_th;  // aligned phase of the previous segment on its extended range
    std::size_t prev_lo = 0;
    int iterations = 0;
    bool converged = true;

    for (std::size_t s = 0; s < nseg; ++s) {
        const std::size_t lo = edges[s] - margin[s];
        const std::size_t hi = edges[s + 1] + margin[s + 1];
        std::vector<double> sa(base_a.begin() + static_cast<long>(lo), base_a.begin() + static_cast<long>(hi) + 1);
        std::vector<double> st(base_th.begin() + static_cast<long>(lo), base_th.begin() + static_cast<long>(hi) + 1);
        if (hi - lo + 1 >= 16) {
            const SampledSignal seg = slice(r, lo, hi);
            // Seed from the segment's ridge closest to the component's frequency there.
            std::vector<double> seed = st;
            double mean_f = 0.0;
            for (std::size_t i = lo; i <= hi; ++i) mean_f += freq[i];
            mean_f /= static_cast<double>(hi - lo + 1);
            try {
                const auto sc = recovery_scalogram(seg, w, recovery_options(cfg));
                const auto ridges = extract_ridges(sc, cfg.ridge_floor);
                std::optional<std::size_t> pick;
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < ridges.size(); ++k) {
                    const double dist = std::abs(std::log(ridges[k].mean_frequency() / mean_f));
                    if (dist < best) best = dist, pick = k;
                }
                if (pick) {
                    const auto p = pair_from_ridge(sc, ridges[*pick], seg.grid());
                    seed.assign(p.theta().begin(), p.theta().end());
                }
            } catch (const InvalidInput&) {
            }
            const auto sol = solve_p2(seg, seed, cfg);
            iterations += sol.iterations;
            converged = converged && sol.converged;
            sa.assign(sol.pair.a().begin(), sol.pair.a().end());
            st.assign(sol.pair.theta().begin(), sol.pair.theta().end());
        }

        // Align to the previous segment over the shared blend region.
        if (s > 0) {
            double diff = 0.0;
            std::size_t cnt = 0;
            const std::size_t b0 = edges[s] - margin[s];
            const std::size_t b1 = edges[s] + margin[s];
            for (std::size_t i = b0; i <= b1; ++i, ++cnt) diff += prev_th[i - prev_lo] - st[i - lo];
            const double offset = two_pi * std::round(diff / static_cast<double>(std::max<std::size_t>(cnt, 1)) / two_pi);
            for (double& v : st) v += offset;
        }

        for (std::size_t i = lo; i <= hi; ++i) {
            double wt = 1.0;
            auto ramp = [](double x) {
                const double c = std::cos(0.5 * std::numbers::pi * std::clamp(x, 0.0, 1.0));
                return c * c;
            };
            if (s > 0 && margin[s] > 0 && i < edges[s] + margin[s])
                wt = 1.0 - ramp(static_cast<double>(i - lo) / static_cast<double>(2 * margin[s]));
            if (s + 1 < nseg && margin[s + 1] > 0 && i > edges[s + 1] - margin[s + 1])
                wt *= ramp(static_cast<double>(i - (edges[s + 1] - margin[s + 1])) / static_cast<double>(2 * margin[s + 1]));
            a[i] += wt * sa[i - lo];
            th[i] += wt * st[i - lo];
            wsum[i] += wt;
        }
        prev_th = std::move(st);
        prev_lo = lo;
    }
    for (std::size_t i = 0; i < n; ++i) {
        a[i] /= wsum[i];
        th[i] /= wsum[i];
    }
    enforce_increasing(th);
    PhasePair stitched(r.grid(), std::move(a), th);
    const double obj = p2_objective(r, stitched);
    // Smooth the junctions with a pass over the whole domain.
    P2Result polished = solve_p2(r, th, cfg);
    if (polished.objective < obj) {
        polished.iterations += iterations;
        if (polished.history.empty() || obj >= polished.history.front())
            polished.history.insert(polished.history.begin(), obj);
        return polished;
    }
    return P2Result{std::move(stitched), obj, iterations, converged, {obj}};
}

Decomposition matching_pursuit(const SampledSignal& f, const PursuitConfig& cfg) {
    cfg.validate();
    const double eps = cfg.params.epsilon;
    const BSplineWavelet w(cfg.wavelet_delta());
    SampledSignal residual = f;
    double res_norm = rms(residual);

    struct Extracted {
        PhasePair pair;
        ComponentDiagnostics diag;
    };
    std::vector<Extracted> found;
    Termination term = Termination::residual_below_threshold;

    if (res_norm >= cfg.params.epsilon0) {
        term = Termination::max_components;
        while (found.size() < cfg.max_components) {
            std::vector<double> seed;
            const std::size_t k = found.size();
            if (cfg.init == PursuitInit::user && k < cfg.user_phases.size()) {
                seed = cfg.user_phases[k];
            } else {
                const auto sc = recovery_scalogram(residual, w, recovery_options(cfg));
                const auto ridges = extract_ridges(sc, cfg.ridge_floor);
                const auto pick = dominant(ridges);
                if (!pick) {
                    term = Termination::no_progress;
                    break;
                }
                const auto p = pair_from_ridge(sc, ridges[*pick], residual.grid());
                seed.assign(p.theta().begin(), p.theta().end());
            }
            P2Result sol = solve_p2(residual, seed, cfg);
            SeparationReport sep = check_scale_separation(sol.pair, eps);
            bool stitched = false;
            const auto breaks = partition_domain(sol.pair.frequency(), cfg.params.d);
            if (!breaks.empty() && !sep.in_dictionary) {
                P2Result alt = refine_by_segments(residual, sol.pair, breaks, cfg);
                const SeparationReport alt_sep = check_scale_separation(alt.pair, eps);
                if (alt.objective < sol.objective && alt_sep.epsilon() <= sep.epsilon()) {
                    sol = std::move(alt);
                    sep = alt_sep;
                    stitched = true;
                }
            }
            SampledSignal next = residual - sol.pair.mode();
            const double next_norm = rms(next);
            if (!(next_norm < res_norm * (1.0 - 1e-9))) {
                term = Termination::no_progress;
                break;
            }
            ComponentDiagnostics diag;
            diag.separation = sep;
            diag.objective = sol.objective;
            diag.iterations = sol.iterations;
            diag.converged = sol.converged;
            diag.extraction_index = k;
            diag.stitched = stitched;
            auto saved = found;
            SampledSignal saved_residual = residual;
            found.push_back({std::move(sol.pair), diag});
            residual = std::move(next);
            for (int sweep = 0; sweep < cfg.refine_sweeps && found.size() > 1; ++sweep) {
                for (auto& e : found) {
                    const SampledSignal target = residual + e.pair.mode();
                    const double before = p2_objective(target, e.pair);
                    const auto th = e.pair.theta();
                    P2Result again = solve_p2(target, th, cfg);
                    if (again.objective < before) {
                        residual = target - again.pair.mode();
                        e.pair = std::move(again.pair);
                        e.diag.separation = check_scale_separation(e.pair, eps);
                        e.diag.objective = again.objective;
                        e.diag.iterations += again.iterations;
                        e.diag.converged = again.converged;
                    }
                }
            }
            // Judged after the sweeps: the neighbours' leakage inflates it before.
            if (found.size() > 1 && found.back().diag.separation.epsilon() > cfg.membership_slack * eps) {
                found = std::move(saved);
                residual = std::move(saved_residual);
                term = Termination::no_progress;
                break;
            }
            res_norm = rms(residual);
            if (res_norm < cfg.params.epsilon0) {
                term = Termination::residual_below_threshold;
                break;
            }
        }
    }

    std::stable_sort(found.begin(), found.end(), [](const Extracted& x, const Extracted& y) {
        return x.pair.mean_frequency() < y.pair.mean_frequency();
    });
    Decomposition d{{}, residual, {}, term};
    for (auto& e : found) {
        d.components.push_back(std::move(e.pair));
        d.diagnostics.push_back(e.diag);
    }
    return d;
}

}  // namespace sparsetf
