#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sparsetf/params.hpp"
#include "sparsetf/signal.hpp"

namespace sparsetf {

/// Known decomposition of a synthetic signal. `params` carries the measured
/// separation factor, adjacent frequency ratio and M' of `pairs`.
struct GroundTruth {
    std::vector<PhasePair> pairs;
    SampledSignal residual;
    DictionaryParams params;
};

struct CrossingExample {
    SampledSignal signal;
    GroundTruth split;    // cos(6 pi k t + k pi) + cos(8 pi k t + k sin 2 pi t)
    GroundTruth swapped;  // the same two phases exchanged at t = 1/2
};

/// Two-tone signal on [0, 1] whose instantaneous frequencies touch at t = 1/2,
/// with the two equally sparse decompositions. Requires k >= 1, n >= 64 k.
CrossingExample gen_crossing_example(int k, std::size_t n);

struct ModeMixingExample {
    SampledSignal signal;
    GroundTruth truth;
    PhasePair spurious;  // a = 5 + |t - 3|, theta = 20 pi t
};

/// Two-component signal on [0, 6]: a1 = 2 + t with a piecewise-cubic phase
/// theta1 (10 pi -> 20 pi rad/s), a2 = 8 - t, theta2 = 2 theta1. Requires n >= 4096.
ModeMixingExample gen_mode_mixing_example(std::size_t n);

/// Phase of the first mode-mixing component.
double mode_mixing_theta1(double t);

struct RandomSignalOptions {
    double noise = 0.0;            // std-dev of additive white noise
    double freq_perturbation = 0.1;  // bound on |theta'/base - 1|
};

/// m periodic components on [0, 1] with integer cycle counts, trig-polynomial
/// (degree <= 3) envelopes and frequency modulations, theta'_{k+1} >= d theta'_k
/// pointwise and measured separation factor <= eps_target. Deterministic per seed.
std::pair<SampledSignal, GroundTruth> gen_random_well_separated(int m, double d, double eps_target,
                                                                std::uint64_t seed, std::size_t n,
                                                                const RandomSignalOptions& opts = {});

}  // namespace sparsetf
