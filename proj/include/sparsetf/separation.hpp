#pragma once

#include <span>
#include <string>
#include <vector>

#include "sparsetf/params.hpp"
#include "sparsetf/signal.hpp"

namespace sparsetf {

/// Measured scale-separation metrics of a single (a, theta) pair.
struct SeparationReport {
    double eps_envelope = 0.0;   // sup |a' / theta'|
    double eps_frequency = 0.0;  // sup |theta'' / theta'^2|
    double m_prime = 1.0;        // sup theta' / inf theta'
    bool in_dictionary = false;

    double epsilon() const { return eps_envelope > eps_frequency ? eps_envelope : eps_frequency; }
};

SeparationReport check_scale_separation(const PhasePair& pair, double eps);

/// Pointwise frequency ratios between components ordered by mean frequency.
/// ratios[i][j] = min_t theta'_j(t) / theta'_i(t).
struct PairwiseSeparation {
    std::vector<std::size_t> order;  // input indices sorted by mean frequency
    std::vector<std::vector<double>> ratios;
    double d_min = 0.0;              // min adjacent ratio
    bool meets_d = false;            // d_min >= params.d
};

PairwiseSeparation check_well_separated(std::span<const PhasePair> pairs, const DictionaryParams& params);

/// |<x, y>| / (||x|| ||y||) for the modes a cos theta of two pairs.
double coherence(const PhasePair& x, const PhasePair& y);

struct NormEquivalence {
    double lhs = 0.0;  // (1/2 - 3 eps) ||a||^2
    double mid = 0.0;  // ||a cos theta||^2
    double rhs = 0.0;  // (1/2 + 3 eps) ||a||^2
    double epsilon = 0.0;
    bool holds = false;
    std::vector<std::string> warnings;  // violated periodicity preconditions
};

NormEquivalence verify_norm_equivalence(const PhasePair& pair);

struct CrossTermBound {
    double value = 0.0;  // |<a cos theta, abar cos thetabar>|
    double bound = 0.0;  // 4 eps (1 + 1/(1 - 1/beta)^2) integral a abar
    double beta = 0.0;
    double epsilon = 0.0;
    bool holds = false;
    std::vector<std::string> warnings;
};

/// Requires beta = min_t thetabar'/theta' > 1 (y is the faster component).
CrossTermBound verify_cross_term_bound(const PhasePair& x, const PhasePair& y);

/// Oscillatory-integral check on [c, c + 2 n pi] for a positive weight g:
/// |integral g cos| against 4 eps integral g and 2 pi eps integral g, where
/// eps = sup |g'/g| is measured from the samples.
struct OscillatoryBound {
    double value = 0.0;
    double weight = 0.0;  // integral g
    double epsilon = 0.0;
    bool holds_4eps = false;
    bool holds_2pi_eps = false;
};

OscillatoryBound verify_oscillatory_integral(double c, int periods, std::span<const double> g);

/// Whether a pair looks periodic on its span: envelope and frequency endpoint
/// mismatch below `rel_tol` relative, and a whole number of carrier cycles.
std::vector<std::string> periodicity_warnings(const PhasePair& pair, double rel_tol = 1e-6);

}  // namespace sparsetf
