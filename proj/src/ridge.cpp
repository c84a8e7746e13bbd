#include "sparsetf/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "interp.hpp"
#include "sparsetf/error.hpp"

namespace sparsetf {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double amplitude(const Scalogram& s, std::size_t ti, std::size_t si) {
    return 2.0 * std::abs(s.at(ti, si)) / std::sqrt(s.scales[si]);
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.begin() + static_cast<long>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

struct Peak {
    std::size_t scale;
    double log_omega;
};

}  // namespace

double RidgeCurve::mean_frequency() const {
    if (omega.empty()) return 0.0;
    double s = 0.0;
    for (double w : omega) s += 1.0 / w;
    return s / static_cast<double>(omega.size());
}

double RidgeCurve::energy() const {
    if (times.size() < 2) return 0.0;
    const double dt = times[1] - times[0];
    double e = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double amp = 2.0 * magnitude[i] / std::sqrt(omega[i]);
        e += amp * amp * dt;
    }
    return e;
}

std::vector<RidgeCurve> extract_ridges(const Scalogram& s, std::optional<double> floor) {
    if (s.empty()) throw InvalidInput("extract_ridges: empty scalogram");
    if (floor && !(*floor > 0.0)) throw InvalidInput("extract_ridges: floor must be positive");
    const std::size_t nt = s.num_times();
    const std::size_t ns = s.num_scales();

    std::vector<double> amp(nt * ns);
    double global_max = 0.0;
    for (std::size_t ti = 0; ti < nt; ++ti)
        for (std::size_t si = 0; si < ns; ++si) {
            amp[ti * ns + si] = amplitude(s, ti, si);
            global_max = std::max(global_max, amp[ti * ns + si]);
        }
    if (global_max == 0.0) return {};

    const double delta = s.wavelet.delta();
    const double band = std::log((1.0 + delta) / (1.0 - delta));
    const double log_step = ns > 1 ? std::log(s.scales[1] / s.scales[0]) : 0.0;

    // Per-slice peaks, located to sub-voice accuracy by a parabola through the
    // neighbouring scales. A peak within one wavelet band of a stronger one in
    // the same slice belongs to the same component and is dropped.
    std::vector<std::vector<Peak>> peaks(nt);
    for (std::size_t ti = 0; ti < nt; ++ti) {
        const double* row = &amp[ti * ns];
        double threshold;
        if (floor) {
            threshold = *floor * global_max;
        } else {
            threshold = std::max(3.0 * median(std::vector<double>(row, row + ns)), 0.1 * global_max);
        }
        std::vector<std::pair<double, Peak>> found;
        for (std::size_t si = 1; si + 1 < ns; ++si) {
            if (row[si] > threshold && row[si] > row[si - 1] && row[si] >= row[si + 1]) {
                const double curv = row[si - 1] - 2.0 * row[si] + row[si + 1];
                const double off = curv < 0.0 ? std::clamp(0.5 * (row[si - 1] - row[si + 1]) / curv, -0.5, 0.5) : 0.0;
                found.push_back({row[si], Peak{si, std::log(s.scales[si]) + off * log_step}});
            }
        }
        std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        for (const auto& [value, p] : found) {
            const bool shadowed = std::any_of(peaks[ti].begin(), peaks[ti].end(), [&](const Peak& q) {
                return std::abs(q.log_omega - p.log_omega) < band;
            });
            if (!shadowed) peaks[ti].push_back(p);
        }
    }

    // Continuity cap: one octave per 1% of the span, but never tighter than
    // 1.5 scale steps so a ridge can move to a neighbouring voice.
    const double span = nt > 1 ? s.times.back() - s.times.front() : 1.0;
    const double step_t = nt > 1 ? s.times[1] - s.times[0] : span;
    const double cap = std::max(std::log(2.0) * step_t / (0.01 * span), 1.5 * log_step);

    struct Active {
        RidgeCurve curve;
        double log_omega;
    };
    std::vector<Active> active;
    std::vector<RidgeCurve> finished;

    auto append = [&](RidgeCurve& c, std::size_t ti, const Peak& p) {
        const std::size_t si = p.scale;
        const double omega = std::exp(p.log_omega);
        const cplx w = s.at(ti, si);
        double ph = -std::arg(w);
        if (!c.phase.empty()) {
            // Continue on the branch closest to the phase advance predicted by the scale.
            const double dt = s.times[ti] - c.times.back();
            const double predicted = c.phase.back() + dt / omega;
            ph += two_pi * std::round((predicted - ph) / two_pi);
        }
        c.time_index.push_back(ti);
        c.scale_index.push_back(si);
        c.times.push_back(s.times[ti]);
        c.omega.push_back(omega);
        c.magnitude.push_back(std::abs(w));
        c.phase.push_back(ph);
    };

    for (std::size_t ti = 0; ti < nt; ++ti) {
        const auto& pk = peaks[ti];
        // Greedy nearest-neighbour assignment in log scale.
        struct Cand {
            double dist;
            std::size_t curve, peak;
        };
        std::vector<Cand> cands;
        for (std::size_t c = 0; c < active.size(); ++c)
            for (std::size_t p = 0; p < pk.size(); ++p) {
                const double dist = std::abs(active[c].log_omega - pk[p].log_omega);
                if (dist <= cap) cands.push_back({dist, c, p});
            }
        std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.dist < b.dist; });
        std::vector<bool> curve_used(active.size(), false), peak_used(pk.size(), false);
        for (const auto& c : cands) {
            if (curve_used[c.curve] || peak_used[c.peak]) continue;
            curve_used[c.curve] = peak_used[c.peak] = true;
            append(active[c.curve].curve, ti, pk[c.peak]);
            active[c.curve].log_omega = pk[c.peak].log_omega;
        }
        std::vector<Active> next;
        for (std::size_t c = 0; c < active.size(); ++c) {
            if (curve_used[c])
                next.push_back(std::move(active[c]));
            else
                finished.push_back(std::move(active[c].curve));
        }
        for (std::size_t p = 0; p < pk.size(); ++p) {
            if (peak_used[p]) continue;
            Active a;
            append(a.curve, ti, pk[p]);
            a.log_omega = pk[p].log_omega;
            next.push_back(std::move(a));
        }
        active = std::move(next);
    }
    for (auto& a : active) finished.push_back(std::move(a.curve));

    const double min_len = 0.05 * span;
    std::vector<RidgeCurve> out;
    for (auto& c : finished) {
        const double len = c.times.size() > 1 ? c.times.back() - c.times.front() : 0.0;
        if (c.times.size() >= 3 && len >= min_len) out.push_back(std::move(c));
    }

    // Ambiguity: two ridges whose wavelet bands overlap at a shared time, or a
    // ridge that starts or stops in the interior next to another ridge.
    auto log_omega_at = [](const RidgeCurve& c, std::size_t ti) -> std::optional<double> {
        if (c.time_index.empty() || ti < c.time_index.front() || ti > c.time_index.back()) return std::nullopt;
        return std::log(c.omega[ti - c.time_index.front()]);
    };
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = i + 1; j < out.size(); ++j) {
            bool clash = false;
            for (std::size_t k = 0; k < out[i].size() && !clash; ++k) {
                const auto other = log_omega_at(out[j], out[i].time_index[k]);
                if (other && std::abs(*other - std::log(out[i].omega[k])) < band) clash = true;
            }
            // Interior endpoints close to the other ridge.
            auto endpoint_clash = [&](const RidgeCurve& a, const RidgeCurve& b) {
                for (std::size_t e : {std::size_t{0}, a.size() - 1}) {
                    const std::size_t ti = a.time_index[e];
                    if (ti <= 2 || ti + 3 >= nt) continue;
                    for (std::size_t probe : {ti - 1, ti, ti + 1}) {
                        const auto other = log_omega_at(b, probe);
                        if (other && std::abs(*other - std::log(a.omega[e])) < 2.0 * band) return true;
                    }
                }
                return false;
            };
            if (clash || endpoint_clash(out[i], out[j]) || endpoint_clash(out[j], out[i]))
                out[i].ambiguous = out[j].ambiguous = true;
        }

    std::stable_sort(out.begin(), out.end(), [](const RidgeCurve& a, const RidgeCurve& b) {
        return a.mean_frequency() < b.mean_frequency();
    });
    return out;
}

bool has_ambiguous_ridges(const std::vector<RidgeCurve>& ridges) {
    return std::any_of(ridges.begin(), ridges.end(), [](const RidgeCurve& r) { return r.ambiguous; });
}

PhasePair pair_from_ridge(const Scalogram& s, const RidgeCurve& ridge, const Grid& grid) {
    if (ridge.size() < 3) throw InvalidInput("ridge too short to recover a component");
    const std::size_t m = ridge.size();
    const double h = ridge.times[1] - ridge.times[0];

    std::vector<double> freq(m);
    for (std::size_t k = 0; k < m; ++k) freq[k] = 1.0 / ridge.omega[k];
    double mean_f = 0.0;
    for (double f : freq) mean_f += f / static_cast<double>(m);
    auto window = static_cast<std::size_t>(std::lround(two_pi / mean_f / h));
    if (window % 2 == 0) ++window;
    freq = detail::moving_average(freq, window);
    // The projection keeps theta strictly increasing.
    const double f_floor = 0.1 * mean_f;
    for (double& f : freq) f = std::max(f, f_floor);

    std::vector<double> theta = cumulative_integrate(freq, h);
    const std::size_t mid = m / 2;
    const double shift = ridge.phase[mid] - theta[mid];
    for (double& v : theta) v += shift;

    std::vector<double> amp(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double hat = s.wavelet.hat(ridge.omega[k] * freq[k]);
        const double raw = 2.0 * ridge.magnitude[k] / std::sqrt(ridge.omega[k]);
        amp[k] = hat > 0.3 ? raw / hat : raw;
    }

    const double t_lo = ridge.times.front();
    const double t_hi = ridge.times.back();
    std::vector<double> a(grid.n), th(grid.n);
    const double amp_floor = 1e-12 * *std::max_element(amp.begin(), amp.end()) + 1e-300;
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double t = grid.time(i);
        if (t < t_lo) {
            th[i] = theta.front() - freq.front() * (t_lo - t);
            a[i] = amp.front();
        } else if (t > t_hi) {
            th[i] = theta.back() + freq.back() * (t - t_hi);
            a[i] = amp.back();
        } else {
            th[i] = detail::cubic_at<double>(theta, t_lo, h, t);
            a[i] = detail::cubic_at<double>(amp, t_lo, h, t);
        }
        a[i] = std::max(a[i], amp_floor);
    }
    // Cubic interpolation can only break monotonicity at sub-sample scale;
    // restore it by a minimal forward sweep.
    for (std::size_t i = 1; i < grid.n; ++i)
        if (!(th[i] > th[i - 1])) th[i] = std::nextafter(th[i - 1], std::numeric_limits<double>::infinity());
    return PhasePair(grid, std::move(a), std::move(th));
}

Scalogram recovery_scalogram(const SampledSignal& f, const BSplineWavelet& w, const RecoveryOptions& opts) {
    const auto range = opts.frequency_range ? *opts.frequency_range : estimate_frequency_range(f);
    const auto scales = log_scales(range.first, range.second, opts.voices);
    const double fastest_period = 2.0 * std::numbers::pi * scales.front() * (1.0 - w.delta());
    const auto stride = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(fastest_period / (4.0 * f.grid().dt()))));
    CwtOptions co;
    co.boundary = opts.boundary;
    co.time_stride = stride;
    return cwt(f, w, scales, co);
}

std::vector<PhasePair> recover_components(const SampledSignal& f, const BSplineWavelet& w,
                                          const RecoveryOptions& opts) {
    const auto s = recovery_scalogram(f, w, opts);
    const auto ridges = extract_ridges(s, opts.floor);
    std::vector<PhasePair> out;
    for (const auto& r : ridges) out.push_back(pair_from_ridge(s, r, f.grid()));
    std::stable_sort(out.begin(), out.end(), [](const PhasePair& x, const PhasePair& y) {
        return x.mean_frequency() < y.mean_frequency();
    });
    return out;
}

namespace {

// Minimum-cost assignment of every row to a distinct column (rows <= cols),
// by dynamic programming over column subsets.
std::vector<std::size_t> assign(const std::vector<std::vector<double>>& cost) {
    const std::size_t rows = cost.size();
    if (rows == 0) return {};
    const std::size_t cols = cost[0].size();
    if (cols > 20) {
        // Greedy fallback for very large problems.
        std::vector<std::size_t> out(rows);
        std::vector<bool> used(cols, false);
        for (std::size_t r = 0; r < rows; ++r) {
            std::size_t best = 0;
            double bc = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < cols; ++c)
                if (!used[c] && cost[r][c] < bc) bc = cost[r][c], best = c;
            used[best] = true;
            out[r] = best;
        }
        return out;
    }
    const std::size_t states = std::size_t{1} << cols;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp(states, inf);
    std::vector<std::size_t> choice(states, 0), prev(states, 0);
    dp[0] = 0.0;
    for (std::size_t mask = 0; mask < states; ++mask) {
        if (dp[mask] == inf) continue;
        const auto r = static_cast<std::size_t>(std::popcount(mask));
        if (r >= rows) continue;
        for (std::size_t c = 0; c < cols; ++c) {
            if (mask & (std::size_t{1} << c)) continue;
            const std::size_t nm = mask | (std::size_t{1} << c);
            const double v = dp[mask] + cost[r][c];
            if (v < dp[nm]) dp[nm] = v, choice[nm] = c, prev[nm] = mask;
        }
    }
    std::size_t best_mask = 0;
    double best = inf;
    for (std::size_t mask = 0; mask < states; ++mask)
        if (static_cast<std::size_t>(std::popcount(mask)) == rows && dp[mask] < best) best = dp[mask], best_mask = mask;
    std::vector<std::size_t> out(rows);
    for (std::size_t mask = best_mask, r = rows; r-- > 0; mask = prev[mask]) out[r] = choice[mask];
    return out;
}

}  // namespace

ComparisonReport compare_components(const std::vector<PhasePair>& x, const std::vector<PhasePair>& y) {
    ComparisonReport rep;
    rep.counts_equal = x.size() == y.size();
    if (x.empty() || y.empty()) return rep;
    for (const auto& p : y)
        if (!same_grid(x.front().grid(), p.grid())) throw InvalidInput("compared decompositions use different grids");

    std::vector<std::vector<double>> fx, fy;
    for (const auto& p : x) fx.push_back(p.frequency());
    for (const auto& p : y) fy.push_back(p.frequency());
    auto distance = [&](std::size_t i, std::size_t j) {
        double s = 0.0;
        for (std::size_t t = 0; t < fx[i].size(); ++t) s += std::abs(std::log(fx[i][t] / fy[j][t]));
        return s / static_cast<double>(fx[i].size());
    };

    const bool transpose = x.size() > y.size();
    const std::size_t rows = transpose ? y.size() : x.size();
    const std::size_t cols = transpose ? x.size() : y.size();
    std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) cost[r][c] = transpose ? distance(c, r) : distance(r, c);
    const auto match = assign(cost);
    for (std::size_t r = 0; r < rows; ++r)
        rep.matched.emplace_back(transpose ? match[r] : r, transpose ? r : match[r]);
    std::sort(rep.matched.begin(), rep.matched.end());

    for (auto [i, j] : rep.matched) {
        const auto& p = x[i];
        const auto& q = y[j];
        auto ap = p.a(), aq = q.a(), tp = p.theta(), tq = q.theta();
        double mean_diff = 0.0;
        for (std::size_t t = 0; t < tp.size(); ++t) mean_diff += tp[t] - tq[t];
        mean_diff /= static_cast<double>(tp.size());
        const double offset = two_pi * std::round(mean_diff / two_pi);
        double ea = 0.0, ep = 0.0, er = 0.0;
        for (std::size_t t = 0; t < tp.size(); ++t) {
            ea = std::max(ea, std::abs(ap[t] - aq[t]));
            ep = std::max(ep, std::abs(tp[t] - tq[t] - offset) / fx[i][t]);
            er = std::max(er, std::abs(ap[t] * std::cos(tp[t]) - aq[t] * std::cos(tq[t])));
        }
        rep.amp_errors.push_back(ea);
        rep.phase_errors.push_back(ep);
        rep.recon_errors.push_back(er);
    }
    return rep;
}

ComparisonReport compare_decompositions(const Decomposition& x, const Decomposition& y) {
    if (!same_grid(x.grid(), y.grid())) throw InvalidInput("compared decompositions use different grids");
    return compare_components(x.components, y.components);
}

}  // namespace sparsetf
