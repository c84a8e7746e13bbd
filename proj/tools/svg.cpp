#include "svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace sparsetf::cli {

namespace {

constexpr int margin_left = 70;
constexpr int margin_right = 20;
constexpr int margin_top = 28;
constexpr int margin_bottom = 40;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// 1-2-5 ticks covering [lo, hi].
std::vector<double> ticks(double lo, double hi, int target = 6) {
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
        out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    return out;
}

// Keeps first/last and the min and max of each bucket.
void thin(const std::vector<double>& x, const std::vector<double>& y, std::size_t max_points,
          std::vector<double>& ox, std::vector<double>& oy) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n <= max_points) {
        ox.assign(x.begin(), x.begin() + static_cast<long>(n));
        oy.assign(y.begin(), y.begin() + static_cast<long>(n));
        return;
    }
    const std::size_t buckets = std::max<std::size_t>(1, max_points / 2);
    for (std::size_t b = 0; b < buckets; ++b) {
        const std::size_t i0 = b * n / buckets;
        const std::size_t i1 = std::max(i0 + 1, (b + 1) * n / buckets);
        std::size_t lo = i0, hi = i0;
        for (std::size_t i = i0; i < i1; ++i) {
            if (y[i] < y[lo]) lo = i;
            if (y[i] > y[hi]) hi = i;
        }
        for (std::size_t i : {std::min(lo, hi), std::max(lo, hi)}) {
            if (!ox.empty() && ox.back() == x[i]) continue;
            ox.push_back(x[i]);
            oy.push_back(y[i]);
        }
    }
}

std::array<int, 3> colormap(double v) {
    // viridis, sampled at five stops
    static constexpr std::array<std::array<double, 3>, 5> stops{{
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    v = std::clamp(v, 0.0, 1.0) * 4.0;
    const int i = std::min(3, static_cast<int>(v));
    const double f = v - i;
    std::array<int, 3> c{};
    for (int k = 0; k < 3; ++k)
        c[k] = static_cast<int>(std::lround(stops[i][k] + f * (stops[i + 1][k] - stops[i][k])));
    return c;
}

}  // namespace

std::string line_plot(const std::vector<Panel>& panels, int width, int panel_height, std::size_t max_points) {
    const int height = panel_height * static_cast<int>(std::max<std::size_t>(1, panels.size()));
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const Panel& panel = panels[p];
        const double top = static_cast<double>(p) * panel_height + margin_top;
        const double plot_w = width - margin_left - margin_right;
        const double plot_h = panel_height - margin_top - margin_bottom;

        double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
        for (const auto& sr : panel.series) {
            for (double v : sr.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
            for (double v : sr.y)
                if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
        }
        if (!std::isfinite(x0)) x0 = 0, x1 = 1;
        if (!std::isfinite(y0)) y0 = 0, y1 = 1;
        if (x1 <= x0) x1 = x0 + 1;
        if (y1 <= y0) {
            const double pad = std::max(1e-12, std::abs(y0) * 0.05);
            y0 -= pad, y1 += pad;
        }
        const double ypad = 0.04 * (y1 - y0);
        y0 -= ypad, y1 += ypad;
        auto X = [&](double v) { return margin_left + (v - x0) / (x1 - x0) * plot_w; };
        auto Y = [&](double v) { return top + plot_h - (v - y0) / (y1 - y0) * plot_h; };

        s << "<text x=\"" << margin_left << "\" y=\"" << px(top - 8) << "\" font-size=\"13\">"
          << escape(panel.title) << "</text>\n";
        s << "<rect x=\"" << margin_left << "\" y=\"" << px(top) << "\" width=\"" << px(plot_w) << "\" height=\""
          << px(plot_h) << "\" fill=\"none\" stroke=\"#444\"/>\n";
        for (double t : ticks(x0, x1)) {
            s << "<line x1=\"" << px(X(t)) << "\" y1=\"" << px(top + plot_h) << "\" x2=\"" << px(X(t)) << "\" y2=\""
              << px(top + plot_h + 4) << "\" stroke=\"#444\"/>";
            s << "<text x=\"" << px(X(t)) << "\" y=\"" << px(top + plot_h + 16) << "\" text-anchor=\"middle\">"
              << fmt(t) << "</text>\n";
        }
        for (double t : ticks(y0, y1, 4)) {
            s << "<line x1=\"" << margin_left - 4 << "\" y1=\"" << px(Y(t)) << "\" x2=\"" << margin_left
              << "\" y2=\"" << px(Y(t)) << "\" stroke=\"#444\"/>";
            s << "<text x=\"" << margin_left - 6 << "\" y=\"" << px(Y(t) + 4) << "\" text-anchor=\"end\">" << fmt(t)
              << "</text>\n";
        }
        if (!panel.xlabel.empty())
            s << "<text x=\"" << px(margin_left + plot_w / 2) << "\" y=\"" << px(top + plot_h + 32)
              << "\" text-anchor=\"middle\">" << escape(panel.xlabel) << "</text>\n";

        double legend_y = top + 14;
        for (const auto& sr : panel.series) {
            std::vector<double> tx, ty;
            thin(sr.x, sr.y, max_points, tx, ty);
            s << "<polyline fill=\"none\" stroke=\"" << sr.color << "\" stroke-width=\"1\" points=\"";
            for (std::size_t i = 0; i < tx.size(); ++i)
                if (std::isfinite(ty[i])) s << px(X(tx[i])) << ',' << px(Y(ty[i])) << ' ';
            s << "\"/>\n";
            if (!sr.label.empty()) {
                s << "<text x=\"" << px(margin_left + plot_w - 6) << "\" y=\"" << px(legend_y)
                  << "\" text-anchor=\"end\" fill=\"" << sr.color << "\">" << escape(sr.label) << "</text>\n";
                legend_y += 14;
            }
        }
    }
    s << "</svg>\n";
    return s.str();
}

std::string heatmap(const std::string& title, const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<std::vector<double>>& z, const std::vector<Track>& tracks, int width,
                    int height) {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << margin_left << "\" y=\"18\" font-size=\"13\">" << escape(title) << "</text>\n";
    const double plot_w = width - margin_left - margin_right;
    const double plot_h = height - margin_top - margin_bottom;
    if (x.empty() || y.empty() || z.empty()) {
        s << "</svg>\n";
        return s.str();
    }
    const double x0 = x.front(), x1 = x.size() > 1 ? x.back() : x.front() + 1;
    const double ly0 = std::log(y.front()), ly1 = y.size() > 1 ? std::log(y.back()) : ly0 + 1;
    auto X = [&](double v) { return margin_left + (v - x0) / (x1 - x0) * plot_w; };
    auto Y = [&](double v) { return margin_top + (std::log(v) - ly0) / (ly1 - ly0) * plot_h; };

    double zmax = 0.0;
    for (const auto& row : z)
        for (double v : row) zmax = std::max(zmax, v);
    if (zmax <= 0) zmax = 1;

    // at most 300 x 150 cells
    const std::size_t nx = x.size(), ny = y.size();
    const std::size_t sx = std::max<std::size_t>(1, (nx + 299) / 300);
    const std::size_t sy = std::max<std::size_t>(1, (ny + 149) / 150);
    const double cw = plot_w / static_cast<double>((nx + sx - 1) / sx);
    const double ch = plot_h / static_cast<double>((ny + sy - 1) / sy);
    for (std::size_t i = 0, ci = 0; i < nx; i += sx, ++ci) {
        for (std::size_t j = 0, cj = 0; j < ny; j += sy, ++cj) {
            double v = 0.0;
            for (std::size_t a = i; a < std::min(nx, i + sx); ++a)
                for (std::size_t b = j; b < std::min(ny, j + sy); ++b) v = std::max(v, z[a][b]);
            const auto c = colormap(v / zmax);
            s << "<rect x=\"" << px(margin_left + ci * cw) << "\" y=\"" << px(margin_top + cj * ch) << "\" width=\""
              << px(cw + 0.5) << "\" height=\"" << px(ch + 0.5) << "\" fill=\"rgb(" << c[0] << ',' << c[1] << ','
              << c[2] << ")\"/>\n";
        }
    }
    for (const auto& tr : tracks) {
        s << "<polyline fill=\"none\" stroke=\"" << (tr.highlight ? "#ff3030" : "white")
          << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < std::min(tr.x.size(), tr.y.size()); ++i)
            s << px(X(tr.x[i])) << ',' << px(Y(tr.y[i])) << ' ';
        s << "\"/>\n";
    }
    s << "<rect x=\"" << margin_left << "\" y=\"" << margin_top << "\" width=\"" << px(plot_w) << "\" height=\""
      << px(plot_h) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (double t : ticks(x0, x1))
        s << "<text x=\"" << px(X(t)) << "\" y=\"" << px(margin_top + plot_h + 16) << "\" text-anchor=\"middle\">"
          << fmt(t) << "</text>\n";
    s << "<text x=\"" << px(margin_left + plot_w / 2) << "\" y=\"" << px(margin_top + plot_h + 32)
      << "\" text-anchor=\"middle\">t</text>\n";
    // decades (or octaves when the range is narrow) on the scale axis
    const double base = (ly1 - ly0) > 2 * std::log(10.0) ? 10.0 : 2.0;
    const double lb = std::log(base);
    for (double e = std::ceil(ly0 / lb); e <= std::floor(ly1 / lb); e += 1.0) {
        const double v = std::pow(base, e);
        s << "<text x=\"" << margin_left - 6 << "\" y=\"" << px(Y(v) + 4) << "\" text-anchor=\"end\">" << fmt(v)
          << "</text>\n";
    }
    s << "<text x=\"14\" y=\"" << px(margin_top + plot_h / 2) << "\" transform=\"rotate(-90 14 "
      << px(margin_top + plot_h / 2) << ")\" text-anchor=\"middle\">scale</text>\n";
    s << "</svg>\n";
    return s.str();
}

}  // namespace sparsetf::cli
