#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sparsetf/signal.hpp"

namespace sparsetf {

using cplx = std::complex<double>;

/// Cardinal B-spline of order 5 (degree 4), supported on [0, 5].
double cardinal_bspline5(double x);

/// Analytic wavelet whose Fourier transform is a scaled, shifted fifth-order
/// B-spline:
///
///   psi_hat(xi) = B5((xi - 1) * 5/(2 delta) + 5/2) / B5(5/2)
///
/// so psi_hat is supported on [1 - delta, 1 + delta], symmetric about 1 and
/// peaks at psi_hat(1) = 1. With the convention
/// psi_hat(xi) = integral e^{-i xi z} psi(z) dz the time-domain wavelet is
///
///   psi(tau) = delta / (5 pi B5(5/2)) * e^{i tau} * sinc(delta tau / 5)^5,
///
/// where sinc(u) = sin(u)/u.
class BSplineWavelet {
public:
    explicit BSplineWavelet(double delta);

    double delta() const { return delta_; }

    double hat(double xi) const;
    cplx operator()(double tau) const;
    cplx derivative(double tau) const;
    cplx second_derivative(double tau) const;

    // |tau| beyond which the sinc^5 envelope is below `rel` of its peak.
    double tail_radius(double rel) const;

private:
    double delta_;
    double peak_;  // psi(0)
};

BSplineWavelet make_wavelet(double delta);

std::vector<cplx> evaluate_time_domain(const BSplineWavelet& w, std::span<const double> tau);

struct WaveletMoments {
    double i1 = 0.0;  // integral |psi|
    double i2 = 0.0;  // integral |tau psi'|
    double i3 = 0.0;  // integral |tau^2 psi''|
};

// Throws NumericalFailure if a lobe integral does not converge.
WaveletMoments moments(const BSplineWavelet& w, double rel_tol = 1e-6);

enum class Boundary { periodic, mirror };

struct CwtOptions {
    Boundary boundary = Boundary::periodic;
    // Keep every k-th time sample in the scalogram.
    std::size_t time_stride = 1;
};

/// Complex CWT values W(t, omega) on a (time x scale) grid, row-major by time.
struct Scalogram {
    std::vector<double> times;
    std::vector<double> scales;
    std::vector<cplx> coeffs;
    BSplineWavelet wavelet{0.2};
    std::vector<std::string> warnings;

    std::size_t num_times() const { return times.size(); }
    std::size_t num_scales() const { return scales.size(); }
    cplx at(std::size_t ti, std::size_t si) const { return coeffs[ti * scales.size() + si]; }
    bool empty() const { return times.empty() || scales.empty(); }
};

/// W(t, omega) = omega^{-1/2} integral f(tau) psi((tau - t)/omega) dtau,
/// computed per scale by FFT on the periodic (or mirrored) extension of f.
Scalogram cwt(const SampledSignal& f, const BSplineWavelet& w, std::span<const double> scales,
              const CwtOptions& opts = {});

/// Log-spaced scales covering frequencies [f_min, f_max] (cycles per unit
/// time), `voices` per octave, ascending in scale.
std::vector<double> log_scales(double f_min, double f_max, int voices);

/// Frequency range (cycles per unit time) holding the significant spectral
/// content of f, widened to leave room for the wavelet band.
std::pair<double, double> estimate_frequency_range(const SampledSignal& f);

struct ConcentrationCheck {
    double error = 0.0;
    double bound = 0.0;
    double epsilon = 0.0;   // measured separation factor of the pair
    double a_sup = 0.0;     // A = sup a
    double m_prime = 0.0;   // measured sup theta' / inf theta'
    double t = 0.0;         // probe time after snapping to the grid
};

/// Compares omega^{-1/2} W(a e^{-i theta})(t, omega) against its main term
/// a(t) e^{-i theta(t)} psi_hat(omega theta'(t)), together with the bound
/// C * eps, C = (A + 4|a| + 1) I1 + [M' + (M' + 1)|a|] I2 + M' |a| I3.
/// `t` is snapped to the nearest grid sample. With Boundary::periodic the pair
/// is extended with a periodic envelope and a phase advancing by
/// theta(t1) - theta(t0) per period; otherwise it is taken as zero outside.
ConcentrationCheck concentration_error(const PhasePair& pair, const BSplineWavelet& w, double t,
                                       double omega, const WaveletMoments& m,
                                       Boundary boundary = Boundary::periodic);

ConcentrationCheck concentration_error(const PhasePair& pair, const BSplineWavelet& w, double t,
                                       double omega, Boundary boundary = Boundary::periodic);

}  // namespace sparsetf
