#pragma once

namespace sparsetf {

/// Dictionary parameters: separation factor epsilon, adjacent frequency ratio d,
/// frequency-range bound M' and the residual threshold epsilon0 (signal units).
struct DictionaryParams {
    double epsilon = 0.05;
    double d = 2.0;
    double m_prime = 1.5;
    double epsilon0 = 1e-2;

    // Throws InvalidInput unless epsilon in (0,1), d > 1, m_prime >= 1, epsilon0 > 0.
    void validate() const;
};

/// Largest wavelet half-bandwidth for which the bands of components with
/// frequency ratio d stay disjoint: (sqrt(d) - 1) / (sqrt(d) + 1).
double max_admissible_delta(double d);

}  // namespace sparsetf
