#include "io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sparsetf/error.hpp"

namespace sparsetf::cli {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::string where(const std::string& name, std::size_t line) { return name + ":" + std::to_string(line) + ": "; }

std::vector<double> number_array(const json& j, const std::string& what) {
    if (!j.is_array()) throw InputError(what + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw InputError(what + "[" + std::to_string(i) + "]: expected a number");
        out.push_back(j[i].get<double>());
    }
    return out;
}

double number(const json& j, const std::string& what) {
    if (!j.is_number()) throw InputError(what + ": expected a number");
    return j.get<double>();
}

}  // namespace

LoadedSignal parse_signal_csv(const std::string& text, const std::string& name) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    std::vector<double> t, v;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        const auto comma = s.find(',');
        if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos)
            throw InputError(where(name, lineno) + "expected two comma-separated fields");
        const std::string a = trim(std::string_view(s).substr(0, comma));
        const std::string b = trim(std::string_view(s).substr(comma + 1));
        if (!header) {
            if (lower(a) != "t" || lower(b) != "value")
                throw InputError(where(name, lineno) + "expected header 't,value'");
            header = true;
            continue;
        }
        double tv = 0.0, vv = 0.0;
        if (!parse_number(a, tv)) throw InputError(where(name, lineno) + "bad time '" + a + "'");
        if (!parse_number(b, vv)) throw InputError(where(name, lineno) + "bad value '" + b + "'");
        if (!t.empty() && !(tv > t.back()))
            throw InputError(where(name, lineno) + "time not strictly increasing");
        t.push_back(tv);
        v.push_back(vv);
    }
    if (!header) throw InputError(name + ": empty file");
    if (t.size() < 4) throw InputError(name + ": need at least 4 samples, got " + std::to_string(t.size()));

    const std::size_t n = t.size();
    const Grid g(t.front(), t.back(), n);
    const double h = g.dt();
    bool uniform = true;
    for (std::size_t i = 1; i < n && uniform; ++i)
        uniform = std::abs((t[i] - t[i - 1]) - h) <= 1e-9 * h;
    if (uniform) return {SampledSignal(g, std::move(v)), false};

    std::vector<double> u(n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = g.time(i);
        while (k + 2 < n && t[k + 1] < ti) ++k;
        const double f = std::clamp((ti - t[k]) / (t[k + 1] - t[k]), 0.0, 1.0);
        u[i] = v[k] + f * (v[k + 1] - v[k]);
    }
    return {SampledSignal(g, std::move(u)), true};
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw InputError(path.string() + ": read error");
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(path.string() + ": cannot write");
    out << text;
    out.close();
    if (!out) throw InputError(path.string() + ": write failed");
}

LoadedSignal read_signal_csv(const std::filesystem::path& path) {
    return parse_signal_csv(read_file(path), path.string());
}

void write_signal_csv(const std::filesystem::path& path, const SampledSignal& f) {
    std::ostringstream out;
    out.precision(17);
    out << "t,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) out << f.grid().time(i) << ',' << f[i] << '\n';
    write_file(path, out.str());
}

json parse_json(const std::string& text, const std::string& name) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') ++line, col = 1;
            else ++col;
        }
        std::string msg = e.what();
        if (const auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
        throw InputError(name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
    }
}

json to_json(const Grid& g) { return {{"t0", g.t0}, {"t1", g.t1}, {"n", g.n}}; }

json to_json(const std::vector<PhasePair>& pairs, const SampledSignal& residual) {
    json comps = json::array();
    for (const auto& p : pairs) {
        comps.push_back({{"a", std::vector<double>(p.a().begin(), p.a().end())},
                         {"theta", std::vector<double>(p.theta().begin(), p.theta().end())}});
    }
    return {{"grid", to_json(residual.grid())},
            {"components", comps},
            {"residual", std::vector<double>(residual.values().begin(), residual.values().end())}};
}

json to_json(const Decomposition& d) {
    json j = to_json(d.components, d.residual);
    json diag = json::array();
    for (const auto& c : d.diagnostics) {
        diag.push_back({{"eps_envelope", c.separation.eps_envelope},
                        {"eps_frequency", c.separation.eps_frequency},
                        {"m_prime", c.separation.m_prime},
                        {"in_dictionary", c.separation.in_dictionary},
                        {"objective", c.objective},
                        {"iterations", c.iterations},
                        {"converged", c.converged},
                        {"extraction_index", c.extraction_index},
                        {"stitched", c.stitched}});
    }
    j["diagnostics"] = diag;
    j["termination"] = to_string(d.termination);
    j["residual_rms"] = rms(d.residual);
    return j;
}

json to_json(const DictionaryParams& p) {
    return {{"epsilon", p.epsilon}, {"d", p.d}, {"m_prime", p.m_prime}, {"epsilon0", p.epsilon0}};
}

json to_json(const PursuitConfig& cfg) {
    json j = to_json(cfg.params);
    j["max_components"] = cfg.max_components;
    j["inner_max_iter"] = cfg.inner_max_iter;
    j["inner_tol"] = cfg.inner_tol;
    j["lowpass_fraction"] = cfg.cutoff();
    j["refine_sweeps"] = cfg.refine_sweeps;
    j["membership_slack"] = cfg.membership_slack;
    j["init"] = cfg.init == PursuitInit::ridge ? "ridge" : "user";
    j["delta"] = cfg.wavelet_delta();
    j["voices"] = cfg.voices;
    j["boundary"] = cfg.boundary == Boundary::periodic ? "periodic" : "mirror";
    j["ridge_floor"] = cfg.ridge_floor ? json(*cfg.ridge_floor) : json(nullptr);
    return j;
}

json to_json(const Scalogram& s, const std::vector<RidgeCurve>& ridges) {
    json mag = json::array();
    for (std::size_t ti = 0; ti < s.num_times(); ++ti) {
        std::vector<double> row(s.num_scales());
        for (std::size_t si = 0; si < s.num_scales(); ++si) row[si] = std::abs(s.at(ti, si));
        mag.push_back(std::move(row));
    }
    json rj = json::array();
    for (const auto& r : ridges) {
        rj.push_back({{"times", r.times},
                      {"omega", r.omega},
                      {"magnitude", r.magnitude},
                      {"mean_frequency", r.mean_frequency()},
                      {"ambiguous", r.ambiguous}});
    }
    return {{"delta", s.wavelet.delta()},
            {"times", s.times},
            {"scales", s.scales},
            {"magnitude", mag},
            {"ridges", rj},
            {"warnings", s.warnings}};
}

LoadedDecomposition decomposition_from_json(const json& j, const std::string& name) {
    try {
        if (!j.is_object()) throw InputError("top level: expected an object");
        if (!j.contains("grid")) throw InputError("missing 'grid'");
        const json& gj = j.at("grid");
        if (!gj.is_object() || !gj.contains("t0") || !gj.contains("t1") || !gj.contains("n"))
            throw InputError("grid: expected t0, t1 and n");
        if (!gj.at("n").is_number_unsigned()) throw InputError("grid.n: expected a positive integer");
        LoadedDecomposition out;
        out.grid = Grid(number(gj.at("t0"), "grid.t0"), number(gj.at("t1"), "grid.t1"), gj.at("n").get<std::size_t>());
        if (!j.contains("components") || !j.at("components").is_array())
            throw InputError("missing 'components' array");
        const json& cs = j.at("components");
        for (std::size_t k = 0; k < cs.size(); ++k) {
            const std::string at = "components[" + std::to_string(k) + "]";
            if (!cs[k].is_object() || !cs[k].contains("a") || !cs[k].contains("theta"))
                throw InputError(at + ": expected 'a' and 'theta'");
            auto a = number_array(cs[k].at("a"), at + ".a");
            auto th = number_array(cs[k].at("theta"), at + ".theta");
            if (a.size() != out.grid.n || th.size() != out.grid.n)
                throw InputError(at + ": length differs from grid.n = " + std::to_string(out.grid.n));
            try {
                out.components.emplace_back(out.grid, std::move(a), std::move(th));
            } catch (const InvalidInput& e) {
                throw InputError(at + ": " + e.what());
            }
        }
        if (j.contains("residual")) {
            out.residual = number_array(j.at("residual"), "residual");
            if (out.residual.size() != out.grid.n)
                throw InputError("residual: length differs from grid.n = " + std::to_string(out.grid.n));
        }
        return out;
    } catch (const InvalidInput& e) {
        throw InputError(name + ": " + e.what());
    } catch (const InputError& e) {
        throw InputError(name + ": " + e.what());
    }
}

LoadedDecomposition read_decomposition(const std::filesystem::path& path) {
    return decomposition_from_json(parse_json(read_file(path), path.string()), path.string());
}

void apply_config(const json& j, PursuitConfig& cfg, const std::string& name) {
    if (!j.is_object()) throw InputError(name + ": expected an object");
    auto num = [&](const std::string& k) { return number(j.at(k), name + ": " + k); };
    auto count = [&](const std::string& k) {
        if (!j.at(k).is_number_integer() || j.at(k).get<long long>() < 0)
            throw InputError(name + ": " + k + ": expected a non-negative integer");
        return j.at(k).get<long long>();
    };
    for (const auto& [key, value] : j.items()) {
        if (key == "epsilon") cfg.params.epsilon = num(key);
        else if (key == "d") cfg.params.d = num(key);
        else if (key == "m_prime") cfg.params.m_prime = num(key);
        else if (key == "epsilon0") cfg.params.epsilon0 = num(key);
        else if (key == "max_components") cfg.max_components = static_cast<std::size_t>(count(key));
        else if (key == "inner_max_iter") cfg.inner_max_iter = static_cast<int>(count(key));
        else if (key == "inner_tol") cfg.inner_tol = num(key);
        else if (key == "lowpass_fraction") {
            if (value.is_null()) cfg.lowpass_fraction.reset();
            else cfg.lowpass_fraction = num(key);
        } else if (key == "refine_sweeps") cfg.refine_sweeps = static_cast<int>(count(key));
        else if (key == "membership_slack") cfg.membership_slack = num(key);
        else if (key == "delta") {
            if (value.is_null()) cfg.delta.reset();
            else cfg.delta = num(key);
        } else if (key == "voices") cfg.voices = static_cast<int>(count(key));
        else if (key == "ridge_floor") {
            if (value.is_null()) cfg.ridge_floor.reset();
            else cfg.ridge_floor = num(key);
        } else if (key == "boundary") {
            const std::string b = value.is_string() ? value.get<std::string>() : "";
            if (b == "periodic") cfg.boundary = Boundary::periodic;
            else if (b == "mirror") cfg.boundary = Boundary::mirror;
            else throw InputError(name + ": boundary: expected \"periodic\" or \"mirror\"");
        } else if (key == "init") {
            const std::string b = value.is_string() ? value.get<std::string>() : "";
            if (b == "ridge") cfg.init = PursuitInit::ridge;
            else if (b == "user") cfg.init = PursuitInit::user;
            else throw InputError(name + ": init: expected \"ridge\" or \"user\"");
        } else if (key == "user_phases") {
            if (!value.is_array()) throw InputError(name + ": user_phases: expected an array of arrays");
            cfg.user_phases.clear();
            for (std::size_t k = 0; k < value.size(); ++k)
                cfg.user_phases.push_back(number_array(value[k], name + ": user_phases[" + std::to_string(k) + "]"));
        } else {
            throw InputError(name + ": unknown key '" + key + "'");
        }
    }
}

}  // namespace sparsetf::cli
