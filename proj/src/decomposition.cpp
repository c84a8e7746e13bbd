#include "sparsetf/decomposition.hpp"

#include <algorithm>

namespace sparsetf {

std::string to_string(Termination t) {
    switch (t) {
        case Termination::residual_below_threshold: return "residual_below_threshold";
        case Termination::max_components: return "max_components";
        case Termination::no_progress: return "no_progress";
    }
    return "unknown";
}

Decomposition make_decomposition(const SampledSignal& signal, std::vector<PhasePair> pairs, double eps) {
    std::stable_sort(pairs.begin(), pairs.end(), [](const PhasePair& x, const PhasePair& y) {
        return x.mean_frequency() < y.mean_frequency();
    });
    SampledSignal residual = signal;
    if (!pairs.empty()) residual = signal - reconstruct(pairs);
    Decomposition d{std::move(pairs), std::move(residual), {}, Termination::residual_below_threshold};
    for (std::size_t k = 0; k < d.components.size(); ++k) {
        ComponentDiagnostics diag;
        diag.separation = check_scale_separation(d.components[k], eps);
        diag.extraction_index = k;
        d.diagnostics.push_back(diag);
    }
    return d;
}

}  // namespace sparsetf
