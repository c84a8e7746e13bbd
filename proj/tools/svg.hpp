#pragma once

#include <string>
#include <vector>

namespace sparsetf::cli {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
};

struct Panel {
    std::string title;
    std::string xlabel;
    std::vector<Series> series;
};

// Stacked line plots sharing a width. Long series are thinned to at most
// `max_points` vertices (min/max per bucket so peaks survive).
std::string line_plot(const std::vector<Panel>& panels, int width = 900, int panel_height = 260,
                      std::size_t max_points = 2000);

// Heatmap of z[row][col] (rows along x, columns along y) with y drawn on a
// log axis from y.front() to y.back(). Ridge tracks are overlaid as polylines.
struct Track {
    std::vector<double> x;
    std::vector<double> y;
    bool highlight = false;
};

std::string heatmap(const std::string& title, const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<std::vector<double>>& z, const std::vector<Track>& tracks = {},
                    int width = 900, int height = 420);

}  // namespace sparsetf::cli
