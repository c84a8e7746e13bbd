#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sparsetf/separation.hpp"
#include "sparsetf/signal.hpp"

namespace sparsetf {

struct ComponentDiagnostics {
    SeparationReport separation;
    double objective = 0.0;         // P2 objective when the component was extracted
    int iterations = 0;
    bool converged = true;
    std::size_t extraction_index = 0;  // 0 = extracted first
    bool stitched = false;          // rebuilt segment-wise after a mode-mixing check
};

enum class Termination {
    residual_below_threshold,
    max_components,
    no_progress,
};

std::string to_string(Termination t);

/// Ordered list of modes (increasing mean frequency) plus the residual, such
/// that reconstruct(components) + residual reproduces the analysed signal.
struct Decomposition {
    std::vector<PhasePair> components;
    SampledSignal residual;
    std::vector<ComponentDiagnostics> diagnostics;
    Termination termination = Termination::residual_below_threshold;

    const Grid& grid() const { return residual.grid(); }
};

/// Decomposition of `signal` by the given pairs (sorted by mean frequency),
/// with the residual taken as the remainder.
Decomposition make_decomposition(const SampledSignal& signal, std::vector<PhasePair> pairs, double eps);

}  // namespace sparsetf
