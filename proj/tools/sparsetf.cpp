#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace sparsetf;
using namespace sparsetf::cli;

namespace {

void add_params(CLI::App* app, Overrides& o) {
    app->add_option("--epsilon", o.epsilon, "separation factor");
    app->add_option("--d", o.d, "adjacent frequency ratio");
    app->add_option("--epsilon0", o.epsilon0, "residual threshold (rms)");
}

void add_wavelet(CLI::App* app, Overrides& o) {
    app->add_option("--delta", o.delta, "wavelet half-bandwidth");
    app->add_option("--voices", o.voices, "voices per octave");
    auto* per = app->add_flag_callback("--periodic", [&o] { o.boundary = Boundary::periodic; }, "periodic extension (default)");
    auto* mir = app->add_flag_callback("--mirror", [&o] { o.boundary = Boundary::mirror; }, "even extension at the ends");
    per->excludes(mir);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse time-frequency decomposition by adaptive matching pursuit"};
    app.set_version_flag("--version", tool_version());
    app.require_subcommand(1);

    Overrides o;
    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "generate an example signal with its ground truth");
    s->add_option("--example", synth.example, "crossing | mode-mixing | random")->required();
    s->add_option("--out", synth.out_dir, "output directory")->required();
    s->add_option("--n", synth.n, "sample count");
    s->add_option("--k", synth.k, "crossing example parameter")->check(CLI::PositiveNumber);
    s->add_option("--m", synth.m, "random: component count")->check(CLI::PositiveNumber);
    s->add_option("--noise", synth.noise, "random: white noise std-dev")->check(CLI::NonNegativeNumber);
    s->add_option("--seed", o.seed, "random: seed");
    s->add_option("--epsilon", o.epsilon, "random: target separation factor");
    s->add_option("--d", o.d, "random: frequency ratio");

    std::filesystem::path signal, out_dir, decomp, other;
    std::optional<std::filesystem::path> config, maybe_out;

    auto* dec = app.add_subcommand("decompose", "matching pursuit decomposition of a signal CSV");
    dec->add_option("signal", signal, "t,value CSV")->required()->check(CLI::ExistingFile);
    dec->add_option("--config", config, "JSON configuration")->check(CLI::ExistingFile);
    dec->add_option("--out", out_dir, "output directory")->required();
    dec->add_option("--tol", o.tol, "inner tolerance (carrier cycles)");
    add_params(dec, o);
    add_wavelet(dec, o);

    auto* ver = app.add_subcommand("verify", "check a decomposition against the dictionary conditions");
    ver->add_option("decomposition", decomp, "decomposition JSON")->required()->check(CLI::ExistingFile);
    ver->add_option("signal", signal, "t,value CSV")->required()->check(CLI::ExistingFile);
    add_params(ver, o);

    auto* cw = app.add_subcommand("cwt", "scalogram, ridges and heatmap");
    cw->add_option("signal", signal, "t,value CSV")->required()->check(CLI::ExistingFile);
    cw->add_option("--out", out_dir, "output directory")->required();
    cw->add_option("--d", o.d, "frequency ratio (sets the default delta)");
    add_wavelet(cw, o);

    auto* cmp = app.add_subcommand("compare", "match and compare two decompositions");
    cmp->add_option("first", decomp, "decomposition JSON")->required()->check(CLI::ExistingFile);
    cmp->add_option("second", other, "decomposition JSON")->required()->check(CLI::ExistingFile);
    cmp->add_option("--tol", o.tol, "fail above this reconstruction error");

    auto* part = app.add_subcommand("partition", "split the domain so theta' varies by less than sqrt(d)");
    part->add_option("decomposition", decomp, "decomposition JSON")->required()->check(CLI::ExistingFile);
    part->add_option("--d", o.d, "frequency ratio");
    part->add_option("--out", maybe_out, "output directory");

    auto* rep = app.add_subcommand("reproduce", "objective values of the mode-mixing example");
    rep->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_input;
    }

    synth.o = o;
    if (*s) return cmd_synth(synth, std::cout, std::cerr);
    if (*dec) return cmd_decompose(signal, config, out_dir, o, std::cout, std::cerr);
    if (*ver) return cmd_verify(decomp, signal, o, std::cout, std::cerr);
    if (*cw) return cmd_cwt(signal, out_dir, o, std::cout, std::cerr);
    if (*cmp) return cmd_compare(decomp, other, o, std::cout, std::cerr);
    if (*part) return cmd_partition(decomp, maybe_out, o, std::cout, std::cerr);
    if (*rep) return cmd_reproduce(out_dir, std::cout, std::cerr);
    return exit_input;
}
