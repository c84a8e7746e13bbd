#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "sparsetf/pursuit.hpp"

namespace sparsetf::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
    exit_ok = 0,
    exit_input = 1,
    exit_nonconvergence = 2,
    exit_verification = 3,
};

std::string tool_version();
std::string sha256_hex(const std::string& bytes);

struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::map<std::string, std::string> input_digest;  // file name -> sha256
    std::string tool_version;

    nlohmann::json to_json() const;
};

// Values given on the command line; unset fields fall through to the config
// file and then to the defaults.
struct Overrides {
    std::optional<double> epsilon;
    std::optional<double> d;
    std::optional<double> epsilon0;
    std::optional<double> delta;
    std::optional<int> voices;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::optional<Boundary> boundary;
};

PursuitConfig resolve_config(const std::optional<fs::path>& config_path, const Overrides& o);

struct SynthArgs {
    std::string example;  // crossing | mode-mixing | random
    fs::path out_dir;
    std::optional<std::size_t> n;
    int k = 32;
    int m = 2;
    double noise = 0.0;
    Overrides o;
};

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);
int cmd_decompose(const fs::path& signal_path, const std::optional<fs::path>& config_path, const fs::path& out_dir,
                  const Overrides& o, std::ostream& out, std::ostream& err);
int cmd_verify(const fs::path& decomp_path, const fs::path& signal_path, const Overrides& o, std::ostream& out,
               std::ostream& err);
int cmd_cwt(const fs::path& signal_path, const fs::path& out_dir, const Overrides& o, std::ostream& out,
            std::ostream& err);
// With `tol` set, exits 3 when the counts differ or a reconstruction error exceeds it.
int cmd_compare(const fs::path& a_path, const fs::path& b_path, const Overrides& o, std::ostream& out,
                std::ostream& err);
int cmd_partition(const fs::path& decomp_path, const std::optional<fs::path>& out_dir, const Overrides& o,
                  std::ostream& out, std::ostream& err);
int cmd_reproduce(const fs::path& out_dir, std::ostream& out, std::ostream& err);

}  // namespace sparsetf::cli
