#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "sparsetf/decomposition.hpp"
#include "sparsetf/wavelet.hpp"

namespace sparsetf {

/// One ridge of a scalogram: per covered time slice, the scale of the local
/// magnitude maximum, |W| there and the unwrapped phase -arg W.
struct RidgeCurve {
    std::vector<std::size_t> time_index;   // into Scalogram::times, consecutive
    std::vector<std::size_t> scale_index;  // into Scalogram::scales
    std::vector<double> times;
    std::vector<double> omega;
    std::vector<double> magnitude;
    std::vector<double> phase;
    bool ambiguous = false;  // meets or crosses another ridge's band

    std::size_t size() const { return times.size(); }
    // Mean of 1/omega (rad per unit time).
    double mean_frequency() const;
    // Integrated squared amplitude estimate (2|W|/sqrt(omega))^2 dt.
    double energy() const;
};

/// Local maxima over scale of the amplitude-normalised magnitude 2|W|/sqrt(omega)
/// above the threshold, linked across time into curves. With `floor` set the
/// threshold is floor * (global maximum); otherwise it is three times the
/// slice median, but never below 10% of the global maximum. Curves covering
/// less than 5% of the span are dropped.
std::vector<RidgeCurve> extract_ridges(const Scalogram& s, std::optional<double> floor = std::nullopt);

/// Any ridge flagged ambiguous (crossing or merging bands).
bool has_ambiguous_ridges(const std::vector<RidgeCurve>& ridges);

/// Envelope/phase pair on `grid` read off a ridge: theta' = 1/omega along the
/// ridge smoothed over one carrier period, theta by integration
/// anchored to -arg W at the ridge midpoint, a = 2|W| / (sqrt(omega) psi_hat(omega theta')).
/// Outside the ridge's time coverage theta' and a are held constant.
PhasePair pair_from_ridge(const Scalogram& s, const RidgeCurve& ridge, const Grid& grid);

struct RecoveryOptions {
    std::optional<double> floor;
    int voices = 32;
    Boundary boundary = Boundary::periodic;
    // Frequency range (cycles per unit time); estimated from the spectrum if unset.
    std::optional<std::pair<double, double>> frequency_range;
};

/// Scalogram computed for recovery: log scales over the signal's frequency
/// range and a time stride keeping at least 4 samples per fastest period.
Scalogram recovery_scalogram(const SampledSignal& f, const BSplineWavelet& w, const RecoveryOptions& opts);

/// One PhasePair per ridge, sorted by mean frequency.
std::vector<PhasePair> recover_components(const SampledSignal& f, const BSplineWavelet& w,
                                          const RecoveryOptions& opts = {});

struct ComparisonReport {
    std::vector<std::pair<std::size_t, std::size_t>> matched;  // (index in x, index in y)
    std::vector<double> amp_errors;     // sup |a_k - a~_j|
    std::vector<double> phase_errors;   // sup |theta_k - theta~_j - 2 pi n| / theta'_k
    std::vector<double> recon_errors;   // sup |a_k cos theta_k - a~_j cos theta~_j|
    bool counts_equal = false;
};

/// Matches components by minimal summed mean |log(theta'_k / theta~'_j)| and
/// reports per-pair errors. Mismatched counts are reported, not raised.
ComparisonReport compare_decompositions(const Decomposition& x, const Decomposition& y);
ComparisonReport compare_components(const std::vector<PhasePair>& x, const std::vector<PhasePair>& y);

}  // namespace sparsetf
