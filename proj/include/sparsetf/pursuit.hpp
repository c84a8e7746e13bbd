#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sparsetf/decomposition.hpp"
#include "sparsetf/params.hpp"
#include "sparsetf/signal.hpp"
#include "sparsetf/wavelet.hpp"

namespace sparsetf {

enum class PursuitInit { ridge, user };

struct PursuitConfig {
    DictionaryParams params;
    std::size_t max_components = 8;
    int inner_max_iter = 60;
    // Stop when the largest phase correction is below this many carrier cycles.
    double inner_tol = 1e-4;
    // Envelope low-pass cutoff relative to the carrier frequency in phase
    // coordinates; default min(1/2, (1 - 1/d)/2) keeps a neighbour at ratio d out.
    std::optional<double> lowpass_fraction;
    // Passes re-solving each accepted component against the signal minus the
    // others after every extraction.
    int refine_sweeps = 2;
    // A second or later candidate whose separation factor, measured after the
    // refinement sweeps, exceeds this multiple of params.epsilon is rejected
    // and the loop stops with no_progress.
    double membership_slack = 4.0;
    PursuitInit init = PursuitInit::ridge;
    // Initial phases for PursuitInit::user, one per component in extraction order;
    // once exhausted the remaining components are ridge-seeded.
    std::vector<std::vector<double>> user_phases;

    // Ridge seeding.
    std::optional<double> delta;  // default: 0.8 (d - 1)/(d + 1), at most 0.5
    int voices = 32;
    Boundary boundary = Boundary::periodic;
    std::optional<double> ridge_floor;

    void validate() const;
    double wavelet_delta() const;
    double cutoff() const;
};

struct P2Result {
    PhasePair pair;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;  // objective after each accepted iterate
};

/// ||f - a cos theta||^2 by the trapezoidal rule.
double p2_objective(const SampledSignal& f, const PhasePair& pair);

/// Alternating demodulation for min ||r - a cos theta||^2 starting from theta_init.
P2Result solve_p2(const SampledSignal& r, std::span<const double> theta_init, const PursuitConfig& cfg);

/// Greedy extraction of components from the dominant ridge of the residual.
Decomposition matching_pursuit(const SampledSignal& f, const PursuitConfig& cfg);

/// Segment start indices (excluding 0) of the greedy left-to-right partition
/// in which every segment keeps sup theta' / inf theta' < sqrt(d). Segments are
/// half-open [b_k, b_{k+1}).
std::vector<std::size_t> partition_domain(std::span<const double> theta_prime, double d);

/// Joint partition: a breakpoint is placed as soon as any profile reaches the ratio.
std::vector<std::size_t> partition_domain(const std::vector<std::vector<double>>& theta_primes, double d);

/// Re-solves `pair` on each segment of the partition and joins the segment
/// phases with 2 pi offsets chosen for continuity, then re-solves on the whole
/// domain from the joined phase and keeps the better of the two. Segments
/// shorter than 16 samples keep the original pair.
P2Result refine_by_segments(const SampledSignal& r, const PhasePair& pair, std::span<const std::size_t> breakpoints,
                            const PursuitConfig& cfg);

}  // namespace sparsetf
