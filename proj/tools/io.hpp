#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsetf/decomposition.hpp"
#include "sparsetf/pursuit.hpp"
#include "sparsetf/ridge.hpp"
#include "sparsetf/signal.hpp"
#include "sparsetf/wavelet.hpp"

namespace sparsetf::cli {

// Malformed or unreadable input; the message names the file and, where
// possible, the line.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LoadedSignal {
    SampledSignal signal;
    bool resampled = false;  // input times were not equally spaced
};

// `t,value` CSV with strictly increasing t. Unequal spacing beyond 1e-9
// relative is resampled linearly onto the uniform grid with the same n.
LoadedSignal parse_signal_csv(const std::string& text, const std::string& name = "<input>");
LoadedSignal read_signal_csv(const std::filesystem::path& path);
void write_signal_csv(const std::filesystem::path& path, const SampledSignal& f);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

// nlohmann parse with the error position given as line:column.
nlohmann::json parse_json(const std::string& text, const std::string& name = "<input>");

nlohmann::json to_json(const Grid& g);
nlohmann::json to_json(const Decomposition& d);
nlohmann::json to_json(const std::vector<PhasePair>& pairs, const SampledSignal& residual);
nlohmann::json to_json(const DictionaryParams& p);
nlohmann::json to_json(const PursuitConfig& cfg);
nlohmann::json to_json(const Scalogram& s, const std::vector<RidgeCurve>& ridges);

// Components and residual of a decomposition file. A missing residual is
// left empty (all zeros).
struct LoadedDecomposition {
    Grid grid;
    std::vector<PhasePair> components;
    std::vector<double> residual;
};

LoadedDecomposition decomposition_from_json(const nlohmann::json& j, const std::string& name = "<input>");
LoadedDecomposition read_decomposition(const std::filesystem::path& path);

// Overrides the fields present in `j` on top of `cfg`. Unknown keys throw.
void apply_config(const nlohmann::json& j, PursuitConfig& cfg, const std::string& name = "<config>");

}  // namespace sparsetf::cli
