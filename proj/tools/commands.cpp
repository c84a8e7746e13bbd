#include "commands.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "io.hpp"
#include "sparsetf/error.hpp"
#include "sparsetf/ridge.hpp"
#include "sparsetf/separation.hpp"
#include "sparsetf/synth.hpp"
#include "svg.hpp"

#ifndef SPARSETF_VERSION
#define SPARSETF_VERSION "0.0.0"
#endif

namespace sparsetf::cli {

using nlohmann::json;

std::string tool_version() { return SPARSETF_VERSION; }

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream s;
    for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return s.str();
}

json RunManifest::to_json() const {
    return {{"command", command}, {"config", config}, {"input_digest", input_digest}, {"tool_version", tool_version}};
}

namespace {

const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string cell(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw InputError(dir.string() + ": cannot create output directory");
}

void write_manifest(const fs::path& dir, const std::string& command, json config,
                    const std::vector<fs::path>& inputs) {
    RunManifest m{command, std::move(config), {}, tool_version()};
    for (const auto& p : inputs) m.input_digest[p.filename().string()] = sha256_hex(read_file(p));
    write_file(dir / "manifest.json", m.to_json().dump(2) + "\n");
}

std::vector<double> as_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

json ground_truth_json(const GroundTruth& gt) {
    json j = to_json(gt.pairs, gt.residual);
    j["params"] = to_json(gt.params);
    return j;
}

// Catches the error types every command maps to exit 1.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
    }
    return exit_input;
}

struct Check {
    std::string name;
    std::string value;
    std::string limit;
    bool pass;
};

void print_table(std::ostream& out, const std::vector<Check>& rows) {
    std::size_t w = 5;
    for (const auto& r : rows) w = std::max(w, r.name.size());
    out << std::left << std::setw(static_cast<int>(w)) << "check" << "  " << std::setw(12) << "value" << "  "
        << std::setw(12) << "limit" << "  result\n";
    for (const auto& r : rows)
        out << std::left << std::setw(static_cast<int>(w)) << r.name << "  " << std::setw(12) << r.value << "  "
            << std::setw(12) << r.limit << "  " << (r.pass ? "PASS" : "FAIL") << '\n';
}

}  // namespace

PursuitConfig resolve_config(const std::optional<fs::path>& config_path, const Overrides& o) {
    PursuitConfig cfg;
    if (config_path) apply_config(parse_json(read_file(*config_path), config_path->string()), cfg, config_path->string());
    if (o.epsilon) cfg.params.epsilon = *o.epsilon;
    if (o.d) cfg.params.d = *o.d;
    if (o.epsilon0) cfg.params.epsilon0 = *o.epsilon0;
    if (o.delta) cfg.delta = *o.delta;
    if (o.voices) cfg.voices = *o.voices;
    if (o.tol) cfg.inner_tol = *o.tol;
    if (o.boundary) cfg.boundary = *o.boundary;
    try {
        cfg.validate();
    } catch (const InvalidInput& e) {
        throw InputError(std::string("configuration: ") + e.what());
    }
    return cfg;
}

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        ensure_dir(args.out_dir);
        json config = {{"example", args.example}};
        if (args.example == "crossing") {
            const std::size_t n = args.n.value_or(std::max<std::size_t>(8192, 128 * static_cast<std::size_t>(args.k)));
            auto ex = gen_crossing_example(args.k, n);
            write_signal_csv(args.out_dir / "signal.csv", ex.signal);
            write_file(args.out_dir / "truth.json", ground_truth_json(ex.split).dump() + "\n");
            write_file(args.out_dir / "truth_swapped.json", ground_truth_json(ex.swapped).dump() + "\n");
            config.update({{"k", args.k}, {"n", n}});
        } else if (args.example == "mode-mixing") {
            const std::size_t n = args.n.value_or(std::size_t{1} << 15);
            auto ex = gen_mode_mixing_example(n);
            write_signal_csv(args.out_dir / "signal.csv", ex.signal);
            write_file(args.out_dir / "truth.json", ground_truth_json(ex.truth).dump() + "\n");
            std::vector<PhasePair> one{ex.spurious};
            write_file(args.out_dir / "spurious.json", to_json(one, ex.signal - ex.spurious.mode()).dump() + "\n");
            config["n"] = n;
        } else if (args.example == "random") {
            const std::size_t n = args.n.value_or(8192);
            const double d = args.o.d.value_or(2.0);
            const double eps = args.o.epsilon.value_or(0.05);
            const std::uint64_t seed = args.o.seed.value_or(0);
            RandomSignalOptions opts;
            opts.noise = args.noise;
            auto [sig, gt] = gen_random_well_separated(args.m, d, eps, seed, n, opts);
            write_signal_csv(args.out_dir / "signal.csv", sig);
            write_file(args.out_dir / "truth.json", ground_truth_json(gt).dump() + "\n");
            config.update({{"m", args.m}, {"d", d}, {"eps_target", eps}, {"seed", seed}, {"n", n}, {"noise", args.noise}});
            out << "measured epsilon " << cell(gt.params.epsilon) << ", d " << cell(gt.params.d) << ", M' "
                << cell(gt.params.m_prime) << '\n';
        } else {
            throw InputError("unknown example '" + args.example + "' (crossing, mode-mixing, random)");
        }
        write_manifest(args.out_dir, "synth", config, {});
        out << "wrote " << (args.out_dir / "signal.csv").string() << '\n';
        return int(exit_ok);
    });
}

int cmd_decompose(const fs::path& signal_path, const std::optional<fs::path>& config_path, const fs::path& out_dir,
                  const Overrides& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const PursuitConfig cfg = resolve_config(config_path, o);
        const auto loaded = read_signal_csv(signal_path);
        if (loaded.resampled) err << "warning: " << signal_path.string() << ": unequal spacing, resampled linearly\n";
        ensure_dir(out_dir);

        std::optional<Decomposition> result;
        try {
            result = matching_pursuit(loaded.signal, cfg);
        } catch (const NumericalFailure& e) {
            err << "error: " << e.what() << " (achieved " << cell(e.achieved()) << ")\n";
            return int(exit_nonconvergence);
        }
        const Decomposition& dec = *result;
        write_file(out_dir / "decomposition.json", to_json(dec).dump() + "\n");

        const auto t = loaded.signal.grid().times();
        for (std::size_t k = 0; k < dec.components.size(); ++k) {
            const auto& p = dec.components[k];
            const auto mode = p.mode();
            std::vector<Panel> panels{
                {"component " + std::to_string(k + 1) + ": envelope a(t)", "", {{"a", t, as_vector(p.a()), palette[0]}}},
                {"instantaneous frequency theta'(t)", "", {{"theta'", t, p.frequency(), palette[1]}}},
                {"reconstruction", "t",
                 {{"signal", t, as_vector(loaded.signal.values()), "#999999"},
                  {"a cos theta", t, as_vector(mode.values()), palette[2]}}}};
            write_file(out_dir / ("component_" + std::to_string(k + 1) + ".svg"), line_plot(panels));
        }
        write_file(out_dir / "residual.svg",
                   line_plot({{"residual (rms " + cell(rms(dec.residual)) + ")", "t",
                               {{"r", t, as_vector(dec.residual.values()), palette[0]}}}}));
        json config = to_json(cfg);
        config["resampled"] = loaded.resampled;
        write_manifest(out_dir, "decompose", config, config_path ? std::vector{signal_path, *config_path} : std::vector{signal_path});

        out << dec.components.size() << " component(s), termination " << to_string(dec.termination)
            << ", residual rms " << cell(rms(dec.residual)) << '\n';
        for (std::size_t k = 0; k < dec.components.size(); ++k) {
            const auto& dg = dec.diagnostics[k];
            out << "  " << k + 1 << ": mean theta' " << cell(dec.components[k].mean_frequency()) << ", eps "
                << cell(dg.separation.epsilon()) << ", objective " << cell(dg.objective)
                << (dg.converged ? "" : " (not converged)") << (dg.stitched ? " (stitched)" : "") << '\n';
        }
        return dec.termination == Termination::residual_below_threshold ? int(exit_ok) : int(exit_nonconvergence);
    });
}

int cmd_verify(const fs::path& decomp_path, const fs::path& signal_path, const Overrides& o, std::ostream& out,
               std::ostream& err) {
    return guarded(err, [&] {
        DictionaryParams params;
        if (o.epsilon) params.epsilon = *o.epsilon;
        if (o.d) params.d = *o.d;
        if (o.epsilon0) params.epsilon0 = *o.epsilon0;
        try {
            params.validate();
        } catch (const InvalidInput& e) {
            throw InputError(std::string("parameters: ") + e.what());
        }
        const auto dec = read_decomposition(decomp_path);
        const auto loaded = read_signal_csv(signal_path);
        if (!same_grid(dec.grid, loaded.signal.grid()))
            throw InputError(decomp_path.string() + ": grid does not match " + signal_path.string());

        std::vector<Check> rows;
        auto pairs = dec.components;
        std::sort(pairs.begin(), pairs.end(),
                  [](const PhasePair& a, const PhasePair& b) { return a.mean_frequency() < b.mean_frequency(); });
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const std::string tag = "c" + std::to_string(k + 1);
            const auto sep = check_scale_separation(pairs[k], params.epsilon);
            rows.push_back({tag + " scale separation", cell(sep.epsilon()), cell(params.epsilon), sep.in_dictionary});
            const auto ne = verify_norm_equivalence(pairs[k]);
            rows.push_back({tag + " norm equivalence", cell(ne.mid), "[" + cell(ne.lhs) + "," + cell(ne.rhs) + "]",
                            ne.holds});
        }
        if (pairs.size() >= 2) {
            const auto ws = check_well_separated(pairs, params);
            rows.push_back({"well separated (d_min)", cell(ws.d_min), cell(params.d), ws.meets_d});
            for (std::size_t i = 0; i < pairs.size(); ++i)
                for (std::size_t j = i + 1; j < pairs.size(); ++j) {
                    const std::string tag = "c" + std::to_string(i + 1) + "/c" + std::to_string(j + 1) + " cross term";
                    try {
                        const auto ct = verify_cross_term_bound(pairs[i], pairs[j]);
                        rows.push_back({tag, cell(ct.value), cell(ct.bound), ct.holds});
                    } catch (const InvalidInput&) {
                        rows.push_back({tag + " (beta <= 1)", "-", "-", false});
                    }
                }
        }
        const SampledSignal residual = pairs.empty() ? loaded.signal : loaded.signal - reconstruct(pairs);
        const double r = rms(residual);
        rows.push_back({"residual rms", cell(r), cell(params.epsilon0), r < params.epsilon0});
        print_table(out, rows);
        const bool ok = std::all_of(rows.begin(), rows.end(), [](const Check& c) { return c.pass; });
        out << (ok ? "all checks passed" : "verification failed") << '\n';
        return ok ? int(exit_ok) : int(exit_verification);
    });
}

int cmd_cwt(const fs::path& signal_path, const fs::path& out_dir, const Overrides& o, std::ostream& out,
            std::ostream& err) {
    return guarded(err, [&] {
        PursuitConfig cfg = resolve_config(std::nullopt, o);
        const auto loaded = read_signal_csv(signal_path);
        if (loaded.resampled) err << "warning: " << signal_path.string() << ": unequal spacing, resampled linearly\n";
        ensure_dir(out_dir);
        const BSplineWavelet w(cfg.wavelet_delta());
        RecoveryOptions ro;
        ro.voices = cfg.voices;
        ro.boundary = cfg.boundary;
        ro.floor = cfg.ridge_floor;
        const auto s = recovery_scalogram(loaded.signal, w, ro);
        const auto ridges = extract_ridges(s, ro.floor);
        for (const auto& wmsg : s.warnings) err << "warning: " << wmsg << '\n';

        write_file(out_dir / "scalogram.json", to_json(s, ridges).dump() + "\n");
        std::vector<std::vector<double>> z(s.num_times(), std::vector<double>(s.num_scales()));
        for (std::size_t ti = 0; ti < s.num_times(); ++ti)
            for (std::size_t si = 0; si < s.num_scales(); ++si)
                z[ti][si] = 2.0 * std::abs(s.at(ti, si)) / std::sqrt(s.scales[si]);
        std::vector<Track> tracks;
        for (const auto& r : ridges) tracks.push_back({r.times, r.omega, r.ambiguous});
        write_file(out_dir / "scalogram.svg",
                   heatmap("|W| (amplitude normalised), delta = " + cell(w.delta()), s.times, s.scales, z, tracks));
        json config = {{"delta", w.delta()},
                       {"voices", cfg.voices},
                       {"boundary", cfg.boundary == Boundary::periodic ? "periodic" : "mirror"}};
        write_manifest(out_dir, "cwt", config, {signal_path});

        out << s.num_times() << " x " << s.num_scales() << " scalogram, " << ridges.size() << " ridge(s)\n";
        for (std::size_t k = 0; k < ridges.size(); ++k)
            out << "  " << k + 1 << ": mean theta' " << cell(ridges[k].mean_frequency()) << ", t in ["
                << cell(ridges[k].times.front()) << ", " << cell(ridges[k].times.back()) << "]"
                << (ridges[k].ambiguous ? " ambiguous" : "") << '\n';
        if (has_ambiguous_ridges(ridges)) out << "ambiguous: crossing or merging ridges detected\n";
        return int(exit_ok);
    });
}

int cmd_compare(const fs::path& a_path, const fs::path& b_path, const Overrides& o, std::ostream& out,
                std::ostream& err) {
    return guarded(err, [&] {
        const auto a = read_decomposition(a_path);
        const auto b = read_decomposition(b_path);
        if (!same_grid(a.grid, b.grid)) throw InputError("decompositions are on different grids");
        const auto rep = compare_components(a.components, b.components);
        out << a.components.size() << " vs " << b.components.size() << " component(s)"
            << (rep.counts_equal ? "" : " (counts differ)") << '\n';
        bool ok = rep.counts_equal;
        for (std::size_t k = 0; k < rep.matched.size(); ++k) {
            out << "  " << rep.matched[k].first + 1 << " <-> " << rep.matched[k].second + 1 << ": amplitude "
                << cell(rep.amp_errors[k]) << ", phase " << cell(rep.phase_errors[k]) << ", reconstruction "
                << cell(rep.recon_errors[k]) << '\n';
            if (o.tol && rep.recon_errors[k] > *o.tol) ok = false;
        }
        if (!o.tol) return int(exit_ok);
        out << (ok ? "within tolerance" : "outside tolerance") << '\n';
        return ok ? int(exit_ok) : int(exit_verification);
    });
}

int cmd_partition(const fs::path& decomp_path, const std::optional<fs::path>& out_dir, const Overrides& o,
                  std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const double d = o.d.value_or(2.0);
        if (!(d > 1.0)) throw InputError("d must exceed 1");
        const auto dec = read_decomposition(decomp_path);
        std::vector<std::vector<double>> profiles;
        for (const auto& p : dec.components) profiles.push_back(p.frequency());
        const auto breaks = partition_domain(profiles, d);

        std::vector<std::size_t> starts{0};
        starts.insert(starts.end(), breaks.begin(), breaks.end());
        json segs = json::array();
        out << starts.size() << " segment(s), limit sqrt(d) = " << cell(std::sqrt(d)) << '\n';
        for (std::size_t s = 0; s < starts.size(); ++s) {
            const std::size_t i0 = starts[s];
            const std::size_t i1 = s + 1 < starts.size() ? starts[s + 1] : dec.grid.n;
            double worst = 1.0;
            for (const auto& p : profiles) {
                const auto [lo, hi] = std::minmax_element(p.begin() + static_cast<long>(i0), p.begin() + static_cast<long>(i1));
                worst = std::max(worst, *hi / *lo);
            }
            out << "  [" << cell(dec.grid.time(i0)) << ", " << cell(dec.grid.time(i1 - 1)) << "] samples " << i0
                << ".." << i1 - 1 << ", max ratio " << cell(worst) << '\n';
            segs.push_back({{"begin", i0}, {"end", i1}, {"t0", dec.grid.time(i0)}, {"t1", dec.grid.time(i1 - 1)},
                            {"max_ratio", worst}});
        }
        if (out_dir) {
            ensure_dir(*out_dir);
            write_file(*out_dir / "partition.json", json{{"d", d}, {"segments", segs}}.dump(2) + "\n");
            write_manifest(*out_dir, "partition", {{"d", d}}, {decomp_path});
        }
        return int(exit_ok);
    });
}

int cmd_reproduce(const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        ensure_dir(out_dir);
        const std::size_t n = std::size_t{1} << 15;
        const auto ex = gen_mode_mixing_example(n);
        struct Row {
            std::string name;
            double value, reference;
        };
        const std::vector<Row> rows{
            {"p(a,theta)", p2_objective(ex.signal, ex.spurious), 72.4},
            {"p(a1,theta1)", p2_objective(ex.signal, ex.truth.pairs[0]), 84.0},
            {"p(a2,theta2)", p2_objective(ex.signal, ex.truth.pairs[1]), 84.0},
        };
        std::ostringstream table;
        table << "quantity,value,reference,relative_deviation,within_2pct\n";
        bool ok = true;
        out << std::left << std::setw(14) << "quantity" << std::setw(12) << "value" << std::setw(12) << "reference"
            << "rel.dev\n";
        for (const auto& r : rows) {
            const double dev = (r.value - r.reference) / r.reference;
            const bool pass = std::abs(dev) <= 0.02;
            ok = ok && pass;
            char line[160];
            std::snprintf(line, sizeof line, "%s,%.6f,%.1f,%.6f,%s\n", r.name.c_str(), r.value, r.reference, dev,
                          pass ? "yes" : "no");
            table << line;
            std::snprintf(line, sizeof line, "%-14s%-12.4f%-12.1f%+.4f %s\n", r.name.c_str(), r.value, r.reference, dev,
                          pass ? "ok" : "FAIL");
            out << line;
        }
        write_file(out_dir / "reproduce.csv", table.str());
        write_manifest(out_dir, "reproduce", {{"n", n}, {"t0", 0.0}, {"t1", 6.0}}, {});
        return ok ? int(exit_ok) : int(exit_verification);
    });
}

}  // namespace sparsetf::cli
