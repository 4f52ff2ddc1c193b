#pragma once

#include <string>
#include <vector>

#include "tkit/donaldson.hpp"
#include "tkit/polymap.hpp"

namespace tkit {

// Scalar field sampled on a rectangular cell grid (n == 1 plots).
struct ValueGrid {
    int nx = 0, ny = 0;
    double x0 = 0, y0 = 0, h = 0;  // lower-left corner and cell size
    std::vector<double> values;    // row-major, ny rows of nx
};

// Margin-field CSV: one row per grid point with
// re/im coordinates, |f|, sigma_min and the pointwise margin.
void write_margin_csv(const PolyMap& p, const GridSpec& grid, bool full_gradient,
                      const std::string& path);

void write_section_csv(const SectionField& s, const Ball& region_g1,
                       double spacing_g1, const std::string& path);

ValueGrid sample_polymap_margin(const PolyMap& p, const GridSpec& grid,
                                bool full_gradient);
ValueGrid sample_section_abs(const SectionField& s, const Ball& region_g1,
                             double spacing_g1);

// Heatmap as per-cell rectangles in a fixed 16-step ramp, optional zero-set
// overlay (positions in the grid's coordinates).
void write_svg_heatmap(const ValueGrid& grid,
                       const std::vector<std::pair<double, double>>& overlay,
                       const std::string& path);

}  // namespace tkit
