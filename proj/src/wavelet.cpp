#include "sparsetf/wavelet.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fft.hpp"
#include "parallel.hpp"
#include "sparsetf/error.hpp"
#include "sparsetf/separation.hpp"

namespace sparsetf {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double b5_center = 115.0 / 192.0;  // B5(5/2)

// sinc(u) = sin(u)/u and its first two derivatives, with series near 0.
double sinc(double u) {
    if (std::abs(u) < 1e-3) {
        const double u2 = u * u;
        return 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
    }
    return std::sin(u) / u;
}

double sinc_d1(double u) {
    if (std::abs(u) < 1e-2) {
        const double u2 = u * u;
        return u * (-1.0 / 3.0 + u2 / 30.0 - u2 * u2 / 840.0);
    }
    return (u * std::cos(u) - std::sin(u)) / (u * u);
}

double sinc_d2(double u) {
    if (std::abs(u) < 1e-2) {
        const double u2 = u * u;
        return -1.0 / 3.0 + u2 / 10.0 - u2 * u2 / 168.0;
    }
    return ((2.0 - u * u) * std::sin(u) - 2.0 * u * std::cos(u)) / (u * u * u);
}

}  // namespace

double cardinal_bspline5(double x) {
    if (x <= 0.0 || x >= 5.0) return 0.0;
    // Symmetric about 5/2; evaluating on the left half keeps the truncated
    // power sum free of large cancellations.
    if (x > 2.5) x = 5.0 - x;
    auto p4 = [](double v) { return v > 0.0 ? v * v * v * v : 0.0; };
    return (p4(x) - 5.0 * p4(x - 1.0) + 10.0 * p4(x - 2.0)) / 24.0;
}

BSplineWavelet::BSplineWavelet(double delta) : delta_(delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("wavelet delta must lie in (0, 1)");
    peak_ = delta_ / (5.0 * pi * b5_center);
}

double BSplineWavelet::hat(double xi) const {
    const double x = (xi - 1.0) * 2.5 / delta_ + 2.5;
    return cardinal_bspline5(x) / b5_center;
}

cplx BSplineWavelet::operator()(double tau) const {
    const double s = sinc(delta_ * tau / 5.0);
    const double s2 = s * s;
    return peak_ * s2 * s2 * s * std::polar(1.0, tau);
}

cplx BSplineWavelet::derivative(double tau) const {
    const double beta = delta_ / 5.0;
    const double s = sinc(beta * tau);
    const double ds = beta * sinc_d1(beta * tau);
    const double s4 = s * s * s * s;
    return peak_ * std::polar(1.0, tau) * cplx(5.0 * s4 * ds, s4 * s);
}

cplx BSplineWavelet::second_derivative(double tau) const {
    const double beta = delta_ / 5.0;
    const double s = sinc(beta * tau);
    const double ds = beta * sinc_d1(beta * tau);
    const double dds = beta * beta * sinc_d2(beta * tau);
    const double s3 = s * s * s;
    const double s4 = s3 * s;
    const double re = -s4 * s + 20.0 * s3 * ds * ds + 5.0 * s4 * dds;
    const double im = 10.0 * s4 * ds;
    return peak_ * std::polar(1.0, tau) * cplx(re, im);
}

double BSplineWavelet::tail_radius(double rel) const {
    // |sinc(u)|^5 <= |u|^-5
    const double u = std::pow(rel, -0.2);
    return 5.0 * u / delta_;
}

BSplineWavelet make_wavelet(double delta) { return BSplineWavelet(delta); }

std::vector<cplx> evaluate_time_domain(const BSplineWavelet& w, std::span<const double> tau) {
    std::vector<cplx> out(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (!std::isfinite(tau[i])) throw InvalidInput("evaluate_time_domain: non-finite tau");
        out[i] = w(tau[i]);
    }
    return out;
}

WaveletMoments moments(const BSplineWavelet& w, double rel_tol) {
    using boost::math::quadrature::gauss_kronrod;
    const double delta = w.delta();
    const double scale = 5.0 / delta;  // tau = scale * u
    const double k = w(0.0).real();
    const double beta = delta / 5.0;

    // Tail bounds for u >= U from |sinc| <= 1/u, |sinc'| <= 2/u, |sinc''| <= 5/u.
    const double c3 = 1.0 + 20.0 * beta + 105.0 * beta * beta;
    auto tail1 = [&](double U) { return 2.0 * k * scale / (4.0 * std::pow(U, 4)); };
    auto tail2 = [&](double U) { return 2.0 * k * scale * scale / std::pow(U, 3); };
    auto tail3 = [&](double U) { return k * std::pow(scale, 3) * c3 / (U * U); };

    auto f1 = [&](double tau) { return std::abs(w(tau)); };
    auto f2 = [&](double tau) { return std::abs(tau * w.derivative(tau)); };
    auto f3 = [&](double tau) { return std::abs(tau * tau * w.second_derivative(tau)); };

    WaveletMoments m;
    double worst = 0.0;
    // Integrate lobe by lobe between zeros of sinc (u = j pi); all three
    // integrands are even in tau.
    for (int lobe = 0;; ++lobe) {
        const double a = scale * pi * lobe;
        const double b = scale * pi * (lobe + 1);
        double e1 = 0.0, e2 = 0.0, e3 = 0.0;
        m.i1 += 2.0 * gauss_kronrod<double, 31>::integrate(f1, a, b, 12, 1e-12, &e1);
        m.i2 += 2.0 * gauss_kronrod<double, 31>::integrate(f2, a, b, 12, 1e-12, &e2);
        m.i3 += 2.0 * gauss_kronrod<double, 31>::integrate(f3, a, b, 12, 1e-12, &e3);
        worst = std::max({worst, e1, e2, e3});
        const double U = pi * (lobe + 1);
        if (lobe >= 1 && tail1(U) < rel_tol * m.i1 && tail2(U) < rel_tol * m.i2 &&
            tail3(U) < rel_tol * m.i3)
            break;
        if (lobe > 200000) throw NumericalFailure("wavelet moment tails did not converge", tail3(U) / m.i3);
    }
    if (worst > 1e-6) throw NumericalFailure("wavelet moment quadrature did not converge", worst);
    return m;
}

Scalogram cwt(const SampledSignal& f, const BSplineWavelet& w, std::span<const double> scales,
              const CwtOptions& opts) {
    if (scales.empty()) throw InvalidInput("cwt needs at least one scale");
    for (std::size_t j = 0; j < scales.size(); ++j) {
        if (!(scales[j] > 0.0) || !std::isfinite(scales[j]))
            throw InvalidInput("cwt scales must be positive and finite");
        if (j > 0 && !(scales[j] > scales[j - 1]))
            throw InvalidInput("cwt scales must be strictly increasing");
    }
    if (opts.time_stride == 0) throw InvalidInput("cwt time stride must be positive");
    const Grid& g = f.grid();
    if (g.n < 3) throw InvalidInput("cwt needs at least 3 samples");

    // Extended periodic record: one period of the periodic signal (dropping the
    // duplicated endpoint), or the even reflection about both ends.
    const std::size_t n_base = g.n - 1;
    const std::size_t len = opts.boundary == Boundary::periodic ? n_base : 2 * n_base;
    const double period = static_cast<double>(len) * g.dt();
    std::vector<cplx> spectrum(len);
    auto v = f.values();
    for (std::size_t m = 0; m < len; ++m) {
        const std::size_t src = m <= n_base ? m : 2 * n_base - m;
        spectrum[m] = v[src];
    }
    const auto fft_ptr = detail::cached_fft(len);
    const detail::Fft& fft = *fft_ptr;
    fft.forward(spectrum);

    Scalogram s;
    s.wavelet = w;
    s.scales.assign(scales.begin(), scales.end());
    for (std::size_t i = 0; i < g.n; i += opts.time_stride) s.times.push_back(g.time(i));
    const std::size_t nt = s.times.size();
    s.coeffs.assign(nt * scales.size(), cplx{});

    for (double omega : scales) {
        if (2.0 * std::numbers::pi * omega / g.dt() < 8.0) {
            s.warnings.push_back("scale " + std::to_string(omega) +
                                 " resolves fewer than 8 samples per wavelet period");
        }
    }

    const double lo = 1.0 - w.delta();
    const double hi = 1.0 + w.delta();
    detail::parallel_for(scales.size(), [&](std::size_t j) {
        const double omega = scales[j];
        std::vector<cplx> work(len, cplx{});
        const double gain = std::sqrt(omega) / static_cast<double>(len);
        // Only negative input frequencies nu with -omega*nu in the band survive.
        for (std::size_t k = 0; k < len; ++k) {
            const double xi = -omega * detail::bin_frequency(k, len, period);
            if (xi > lo && xi < hi) work[k] = spectrum[k] * (gain * w.hat(xi));
        }
        fft.backward(work);
        for (std::size_t ti = 0; ti < nt; ++ti) {
            const std::size_t i = ti * opts.time_stride;
            s.coeffs[ti * scales.size() + j] = work[i % len];
        }
    });
    return s;
}

std::vector<double> log_scales(double f_min, double f_max, int voices) {
    if (!(f_min > 0.0) || !(f_max > f_min)) throw InvalidInput("log_scales needs 0 < f_min < f_max");
    if (voices < 1) throw InvalidInput("log_scales needs at least one voice per octave");
    const double w_lo = 1.0 / (2.0 * pi * f_max);
    const double w_hi = 1.0 / (2.0 * pi * f_min);
    const double octaves = std::log2(w_hi / w_lo);
    const auto count = static_cast<std::size_t>(std::ceil(octaves * voices)) + 1;
    std::vector<double> s(count);
    for (std::size_t j = 0; j < count; ++j) s[j] = w_lo * std::exp2(static_cast<double>(j) / voices);
    return s;
}

std::pair<double, double> estimate_frequency_range(const SampledSignal& f) {
    const Grid& g = f.grid();
    const std::size_t len = g.n - 1;
    std::vector<cplx> spec(len);
    for (std::size_t m = 0; m < len; ++m) spec[m] = f[m];
    const auto fft_ptr = detail::cached_fft(len);
    const detail::Fft& fft = *fft_ptr;
    fft.forward(spec);
    const double period = static_cast<double>(len) * g.dt();
    double peak = 0.0;
    for (std::size_t k = 1; k < (len + 1) / 2; ++k) peak = std::max(peak, std::abs(spec[k]));
    const double nyquist = 0.5 / g.dt();
    const double lowest = 1.0 / period;
    if (peak == 0.0) return {lowest, nyquist};
    std::size_t k_lo = 0, k_hi = 0;
    for (std::size_t k = 1; k < (len + 1) / 2; ++k) {
        if (std::abs(spec[k]) > 1e-2 * peak) {
            if (k_lo == 0) k_lo = k;
            k_hi = k;
        }
    }
    const double f_lo = std::max(lowest, static_cast<double>(k_lo) / period / 1.5);
    const double f_hi = std::min(nyquist, static_cast<double>(k_hi) / period * 1.5);
    return {f_lo, std::max(f_hi, f_lo * 2.0)};
}

ConcentrationCheck concentration_error(const PhasePair& pair, const BSplineWavelet& w, double t,
                                       double omega, const WaveletMoments& m, Boundary boundary) {
    if (!(omega > 0.0)) throw InvalidInput("concentration_error needs a positive scale");
    const Grid& g = pair.grid();
    const double dt = g.dt();
    const auto n = static_cast<long>(g.n);
    const long idx = std::clamp(std::lround((t - g.t0) / dt), 0L, n - 1);
    auto a = pair.a();
    auto th = pair.theta();
    const auto freq = pair.frequency();

    // Periodic extension uses one period of n-1 samples; the phase advances by
    // the full-span increment each period.
    const long per = n - 1;
    const double phase_step = th[per] - th[0];
    const double radius = w.tail_radius(1e-8) * omega;
    const long reach = static_cast<long>(std::ceil(radius / dt));

    cplx acc{};
    for (long off = -reach; off <= reach; ++off) {
        const long j = idx + off;
        double amp, phase;
        if (boundary == Boundary::periodic) {
            const long wraps = (j >= 0) ? j / per : -((-j + per - 1) / per);
            const long r = j - wraps * per;
            amp = a[r];
            phase = th[r] + static_cast<double>(wraps) * phase_step;
        } else {
            if (j < 0 || j >= n) continue;
            amp = a[j];
            phase = th[j];
        }
        const double tau = static_cast<double>(off) * dt;
        double weight = dt;
        if (boundary != Boundary::periodic && (j == 0 || j == n - 1)) weight *= 0.5;
        acc += weight * amp * std::polar(1.0, -phase) * w(tau / omega);
    }
    const cplx normalized = acc / omega;  // omega^{-1/2} W
    const cplx main = a[idx] * std::polar(1.0, -th[idx]) * w.hat(omega * freq[idx]);

    const auto rep = check_scale_separation(pair, 1.0 - 1e-12);
    ConcentrationCheck out;
    out.t = g.time(static_cast<std::size_t>(idx));
    out.error = std::abs(normalized - main);
    out.epsilon = std::max(rep.eps_envelope, rep.eps_frequency);
    out.m_prime = rep.m_prime;
    out.a_sup = *std::max_element(a.begin(), a.end());
    const double at = a[idx];
    const double c = (out.a_sup + 4.0 * at + 1.0) * m.i1 +
                     (out.m_prime + (out.m_prime + 1.0) * at) * m.i2 + out.m_prime * at * m.i3;
    out.bound = c * out.epsilon;
    return out;
}

ConcentrationCheck concentration_error(const PhasePair& pair, const BSplineWavelet& w, double t,
                                       double omega, Boundary boundary) {
    return concentration_error(pair, w, t, omega, moments(w), boundary);
}

}  // namespace sparsetf
