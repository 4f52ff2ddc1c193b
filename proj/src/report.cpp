#include "tkit/report.hpp"

#include <cstdio>
#include <fstream>

#include "tkit/errors.hpp"
#include "tkit/margin.hpp"

namespace tkit {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* kRamp16[16] = {
    "#0d0887", "#2d0594", "#44039e", "#5c01a6", "#7201a8", "#8707a6", "#9a169f",
    "#ac2694", "#bc3587", "#cc4778", "#d95969", "#e56b5d", "#ef7e50", "#f69441",
    "#fca636", "#fcce25"};

}  // namespace

void write_margin_csv(const PolyMap& p, const GridSpec& grid, bool full_gradient,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write " + path);
    const int n = p.n();
    out << "re_z1,im_z1";
    for (int i = 1; i < n; ++i) out << ",re_z" << i + 1 << ",im_z" << i + 1;
    out << ",abs_f,sigma_min,margin\n";
    grid.visit([&](const CVec& z) {
        JetSample J = p.jet(z);
        double sigma = p.m() <= p.n() ? min_singular_value(J.dz) : 0.0;
        double margin = margin_at(J, full_gradient);
        for (int i = 0; i < n; ++i) {
            if (i) out << ",";
            out << fmt(z[i].real()) << "," << fmt(z[i].imag());
        }
        out << "," << fmt(J.value.norm()) << "," << fmt(sigma) << "," << fmt(margin)
            << "\n";
    });
}

void write_section_csv(const SectionField& s, const Ball& region_g1,
                       double spacing_g1, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write " + path);
    const int n = region_g1.n();
    out << "re_z1,im_z1";
    for (int i = 1; i < n; ++i) out << ",re_z" << i + 1 << ",im_z" << i + 1;
    out << ",abs_f,sigma_min,margin\n";
    GridSpec grid{region_g1, spacing_g1};
    grid.visit([&](const CVec& y) {
        SectionField::Jet J = s.jet(y);
        double sigma = std::max(0.0, J.dz.norm() - J.dzbar.norm());
        for (int i = 0; i < n; ++i) {
            if (i) out << ",";
            out << fmt(y[i].real()) << "," << fmt(y[i].imag());
        }
        out << "," << fmt(std::abs(J.value)) << "," << fmt(sigma) << ","
            << fmt(std::max(std::abs(J.value), sigma)) << "\n";
    });
}

ValueGrid sample_polymap_margin(const PolyMap& p, const GridSpec& grid,
                                bool full_gradient) {
    if (p.n() != 1) throw std::invalid_argument("heatmaps need n == 1");
    ValueGrid vg;
    vg.h = grid.spacing;
    double r = grid.ball.radius;
    vg.x0 = grid.ball.center[0].real() - r;
    vg.y0 = grid.ball.center[0].imag() - r;
    vg.nx = vg.ny = static_cast<int>(std::ceil(2 * r / vg.h));
    vg.values.assign(static_cast<std::size_t>(vg.nx) * vg.ny, -1.0);
    for (int j = 0; j < vg.ny; ++j)
        for (int i = 0; i < vg.nx; ++i) {
            CVec z(1);
            z[0] = Complex(vg.x0 + (i + 0.5) * vg.h, vg.y0 + (j + 0.5) * vg.h);
            if ((z - grid.ball.center).norm() > r) continue;
            vg.values[static_cast<std::size_t>(j) * vg.nx + i] =
                margin_at(p.jet(z), full_gradient);
        }
    return vg;
}

ValueGrid sample_section_abs(const SectionField& s, const Ball& region_g1,
                             double spacing_g1) {
    if (region_g1.n() != 1) throw std::invalid_argument("heatmaps need n == 1");
    ValueGrid vg;
    vg.h = spacing_g1;
    double r = region_g1.radius;
    vg.x0 = region_g1.center[0].real() - r;
    vg.y0 = region_g1.center[0].imag() - r;
    vg.nx = vg.ny = static_cast<int>(std::ceil(2 * r / vg.h));
    vg.values.assign(static_cast<std::size_t>(vg.nx) * vg.ny, -1.0);
    for (int j = 0; j < vg.ny; ++j)
        for (int i = 0; i < vg.nx; ++i) {
            CVec z(1);
            z[0] = Complex(vg.x0 + (i + 0.5) * vg.h, vg.y0 + (j + 0.5) * vg.h);
            if ((z - region_g1.center).norm() > r) continue;
            vg.values[static_cast<std::size_t>(j) * vg.nx + i] =
                std::abs(s.jet(z).value);
        }
    return vg;
}

void write_svg_heatmap(const ValueGrid& grid,
                       const std::vector<std::pair<double, double>>& overlay,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write " + path);
    double vmax = 0.0;
    for (double v : grid.values) vmax = std::max(vmax, v);
    if (vmax <= 0) vmax = 1.0;
    const double px = 6.0;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
        << grid.nx * px << "\" height=\"" << grid.ny * px << "\">\n";
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            double v = grid.values[static_cast<std::size_t>(j) * grid.nx + i];
            if (v < 0) continue;
            int bucket = std::min(15, static_cast<int>(16.0 * v / vmax));
            out << "<rect x=\"" << fmt(i * px) << "\" y=\""
                << fmt((grid.ny - 1 - j) * px) << "\" width=\"" << fmt(px)
                << "\" height=\"" << fmt(px) << "\" fill=\"" << kRamp16[bucket]
                << "\"/>\n";
        }
    for (const auto& [x, y] : overlay) {
        double cx = (x - grid.x0) / grid.h * px;
        double cy = (grid.ny - (y - grid.y0) / grid.h) * px;
        out << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy)
            << "\" r=\"" << fmt(px * 0.8)
            << "\" fill=\"none\" stroke=\"#ffffff\" stroke-width=\"2\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace tkit
