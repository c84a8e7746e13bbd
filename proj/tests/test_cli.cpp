#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "io.hpp"

using namespace sparsetf;
using namespace sparsetf::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("sparsetf_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path operator/(const std::string& s) const { return path / s; }
};

struct Run {
    int code;
    std::string out, err;
};

int run_binary(const std::string& args) {
    const std::string cmd = std::string(SPARSETF_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Run synth(const std::string& example, const fs::path& dir, std::optional<std::size_t> n = std::nullopt,
          Overrides o = {}, int m = 2) {
    SynthArgs a;
    a.example = example;
    a.out_dir = dir;
    a.n = n;
    a.m = m;
    a.o = o;
    std::ostringstream out, err;
    const int code = cmd_synth(a, out, err);
    return {code, out.str(), err.str()};
}

Run decompose(const fs::path& signal, const fs::path& out_dir, Overrides o = {},
              std::optional<fs::path> config = std::nullopt) {
    std::ostringstream out, err;
    const int code = cmd_decompose(signal, config, out_dir, o, out, err);
    return {code, out.str(), err.str()};
}

Run verify(const fs::path& decomp, const fs::path& signal, Overrides o = {}) {
    std::ostringstream out, err;
    const int code = cmd_verify(decomp, signal, o, out, err);
    return {code, out.str(), err.str()};
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("sha256 of a known vector") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("csv parsing reports the offending line") {
    CHECK_THROWS_WITH_AS(parse_signal_csv("", "s.csv"), doctest::Contains("s.csv"), InputError);
    CHECK_THROWS_WITH_AS(parse_signal_csv("t,value\n0,1\n0.1,abc\n0.2,3\n0.3,4\n", "s.csv"), doctest::Contains("s.csv:3"),
                         InputError);
    CHECK_THROWS_WITH_AS(parse_signal_csv("t,value\n0,1\n0.2,2\n0.1,3\n0.3,4\n", "s.csv"), doctest::Contains("s.csv:4"),
                         InputError);
    CHECK_THROWS_AS(parse_signal_csv("time,x\n0,1\n1,2\n2,3\n3,4\n"), InputError);
    CHECK_THROWS_AS(parse_signal_csv("t,value\n0,1\n1,2\n"), InputError);
}

TEST_CASE("csv with uneven spacing is resampled onto a uniform grid") {
    auto s = parse_signal_csv("t,value\n0,0\n0.1,1\n0.3,3\n0.4,4\n1.0,10\n");
    CHECK(s.resampled);
    CHECK(s.signal.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(s.signal[i] == doctest::Approx(10 * s.signal.grid().time(i)));
    auto u = parse_signal_csv("t,value\n0,0\n0.25,1\n0.5,3\n0.75,4\n1.0,10\n");
    CHECK_FALSE(u.resampled);
}

TEST_CASE("json errors carry line and column") {
    CHECK_THROWS_WITH_AS(parse_json("{\n  \"epsilon\": 0.1,\n  oops\n}", "c.json"), doctest::Contains("c.json:3:"),
                         InputError);
}

TEST_CASE("unknown config keys are rejected") {
    PursuitConfig cfg;
    CHECK_THROWS_AS(apply_config(nlohmann::json{{"epsilonn", 0.1}}, cfg), InputError);
    apply_config(nlohmann::json{{"epsilon", 0.1}, {"boundary", "mirror"}, {"max_components", 3}}, cfg);
    CHECK(cfg.params.epsilon == 0.1);
    CHECK(cfg.boundary == Boundary::mirror);
    CHECK(cfg.max_components == 3);
}

TEST_CASE("decomposition json round trip") {
    TempDir dir;
    REQUIRE(synth("random", dir.path, 2048, {.epsilon = 0.05, .seed = 3}).code == 0);
    auto loaded = read_decomposition(dir / "truth.json");
    CHECK(loaded.components.size() == 2);
    CHECK(loaded.grid.n == 2048);
    auto again = decomposition_from_json(to_json(loaded.components, SampledSignal(loaded.grid, loaded.residual)));
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t i = 0; i < loaded.grid.n; i += 97)
            CHECK(again.components[k].theta()[i] == loaded.components[k].theta()[i]);
}

TEST_CASE("decompose: empty csv exits 1") {
    TempDir dir;
    write_text(dir / "empty.csv", "");
    auto r = decompose(dir / "empty.csv", dir / "out");
    CHECK(r.code == exit_input);
    CHECK(r.err.find("empty.csv") != std::string::npos);
}

TEST_CASE("decompose: malformed config exits 1 with its position") {
    TempDir dir;
    REQUIRE(synth("random", dir.path, 2048).code == 0);
    write_text(dir / "bad.json", "{\n \"epsilon\": ,\n}\n");
    auto r = decompose(dir / "signal.csv", dir / "out", {}, dir / "bad.json");
    CHECK(r.code == exit_input);
    CHECK(r.err.find("bad.json:2:") != std::string::npos);
}

TEST_CASE("decompose: signal below threshold gives no components") {
    TempDir dir;
    std::ostringstream csv;
    csv << "t,value\n";
    for (int i = 0; i < 1024; ++i) csv << i / 1023.0 << ',' << 1e-4 * std::cos(2 * std::numbers::pi * 20 * i / 1023.0) << '\n';
    write_text(dir / "quiet.csv", csv.str());
    auto r = decompose(dir / "quiet.csv", dir / "out");
    CHECK(r.code == exit_ok);
    auto j = parse_json(read_file(dir / "out" / "decomposition.json"));
    CHECK(j["components"].empty());
    CHECK(fs::exists(dir / "out" / "manifest.json"));
    CHECK(fs::exists(dir / "out" / "residual.svg"));
}

TEST_CASE("decompose writes plots, json and a manifest with the input digest") {
    TempDir dir;
    REQUIRE(synth("random", dir.path, 4096, {.epsilon = 0.03, .seed = 4}).code == 0);
    auto r = decompose(dir / "signal.csv", dir / "out");
    CHECK(r.code == exit_ok);
    auto j = parse_json(read_file(dir / "out" / "decomposition.json"));
    CHECK(j["components"].size() == 2);
    CHECK(fs::exists(dir / "out" / "component_1.svg"));
    CHECK(fs::exists(dir / "out" / "component_2.svg"));
    auto m = parse_json(read_file(dir / "out" / "manifest.json"));
    CHECK(m["input_digest"]["signal.csv"] == sha256_hex(read_file(dir / "signal.csv")));
    CHECK(m["command"] == "decompose");
    CHECK(m["tool_version"] == tool_version());
    CHECK(read_file(dir / "out" / "component_1.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("decompose: mode-mixing input with the default config" * doctest::should_fail()) {
    TempDir dir;
    REQUIRE(synth("mode-mixing", dir.path).code == 0);
    auto r = decompose(dir / "signal.csv", dir / "out");
    CHECK(r.code == exit_ok);
    auto j = parse_json(read_file(dir / "out" / "decomposition.json"));
    CHECK(j["components"].size() == 2);
}

TEST_CASE("verify: random ground truth passes") {
    TempDir dir;
    REQUIRE(synth("random", dir.path, 4096, {.epsilon = 0.05, .seed = 8}, 3).code == 0);
    auto r = verify(dir / "truth.json", dir / "signal.csv");
    CHECK(r.code == exit_ok);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("verify: the spurious single pair fails the residual check") {
    TempDir dir;
    REQUIRE(synth("mode-mixing", dir.path, 8192).code == 0);
    auto r = verify(dir / "spurious.json", dir / "signal.csv", {.epsilon = 1 / (10 * std::numbers::pi), .d = 2.0});
    CHECK(r.code == exit_verification);
    CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("verify: crossing example is not well separated at d = 4/3") {
    TempDir dir;
    REQUIRE(synth("crossing", dir.path).code == 0);
    auto r = verify(dir / "truth.json", dir / "signal.csv", {.d = 4.0 / 3.0});
    CHECK(r.code == exit_verification);
}

TEST_CASE("compare with a tolerance") {
    TempDir dir;
    REQUIRE(synth("crossing", dir.path).code == 0);
    std::ostringstream out, err;
    CHECK(cmd_compare(dir / "truth.json", dir / "truth.json", {.tol = 1e-9}, out, err) == exit_ok);
    CHECK(cmd_compare(dir / "truth.json", dir / "truth_swapped.json", {.tol = 0.1}, out, err) == exit_verification);
    CHECK(cmd_compare(dir / "truth.json", dir / "truth_swapped.json", {}, out, err) == exit_ok);
}

TEST_CASE("partition writes segments") {
    TempDir dir;
    REQUIRE(synth("mode-mixing", dir.path, 8192).code == 0);
    std::ostringstream out, err;
    CHECK(cmd_partition(dir / "truth.json", dir / "part", {.d = 2.0}, out, err) == exit_ok);
    auto j = parse_json(read_file(dir / "part" / "partition.json"));
    CHECK(j.dump().find("segments") != std::string::npos);
}

TEST_CASE("cwt writes a scalogram and heatmap") {
    TempDir dir;
    REQUIRE(synth("random", dir.path, 2048, {.seed = 1}).code == 0);
    std::ostringstream out, err;
    CHECK(cmd_cwt(dir / "signal.csv", dir / "cw", {}, out, err) == exit_ok);
    CHECK(fs::exists(dir / "cw" / "scalogram.json"));
    CHECK(fs::exists(dir / "cw" / "scalogram.svg"));
}

TEST_CASE("reproduce: three rows, exit 0, deterministic") {
    TempDir dir;
    std::ostringstream out1, out2, err;
    CHECK(cmd_reproduce(dir / "a", out1, err) == exit_ok);
    CHECK(cmd_reproduce(dir / "b", out2, err) == exit_ok);
    const auto t1 = read_file(dir / "a" / "reproduce.csv");
    CHECK(t1 == read_file(dir / "b" / "reproduce.csv"));
    CHECK(std::count(t1.begin(), t1.end(), '\n') == 4);
    CHECK(out1.str() == out2.str());
}

TEST_CASE("reproduce: unwritable output exits 1") {
    TempDir dir;
    write_text(dir / "file", "x");
    std::ostringstream out, err;
    CHECK(cmd_reproduce(dir / "file" / "sub", out, err) == exit_input);
}

TEST_CASE("binary: argument errors exit 1, help exits 0") {
    CHECK(run_binary("--help") == 0);
    CHECK(run_binary("") == 1);
    CHECK(run_binary("decompose") == 1);
    CHECK(run_binary("synth --example random --out /dev/null/x") == 1);
    CHECK(run_binary("frobnicate") == 1);
}

TEST_CASE("binary: synth then verify round trip") {
    TempDir dir;
    CHECK(run_binary("synth --example random --seed 5 --n 4096 --out " + dir.path.string()) == 0);
    CHECK(run_binary("verify " + (dir / "truth.json").string() + " " + (dir / "signal.csv").string()) == 0);
}
