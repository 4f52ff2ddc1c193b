#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "tkit/parallel.hpp"

namespace tkit {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

struct Ball {
    CVec center;
    double radius = 1.0;

    int n() const { return static_cast<int>(center.size()); }
    bool contains(const CVec& z) const { return (z - center).norm() <= radius; }

    static Ball unit(int n) { return Ball{CVec::Zero(n), 1.0}; }
    // Enlarged copy about the same center.
    Ball scaled(double factor) const { return Ball{center, radius * factor}; }
};

// Axis-aligned lattice in the 2n real coordinates, anchored at the ball
// center. Lattice points within radius + cover_radius are kept, so every
// ball point lies within cover_radius of a kept point.
struct GridSpec {
    Ball ball;
    double spacing = 1.0 / 64.0;

    int n() const { return ball.n(); }
    double cover_radius() const {
        return spacing * std::sqrt(2.0 * n()) / 2.0;
    }

    static GridSpec standard(const Ball& b) {
        return GridSpec{b, b.radius / 64.0};
    }

    // Number of lattice steps per real axis on each side of the center.
    int steps_per_side() const {
        if (spacing <= 0) throw std::invalid_argument("grid spacing must be positive");
        return static_cast<int>(std::ceil((ball.radius + cover_radius()) / spacing));
    }

    std::size_t candidate_count() const {
        std::size_t per_axis = 2 * static_cast<std::size_t>(steps_per_side()) + 1;
        std::size_t total = 1;
        for (int a = 0; a < 2 * n(); ++a) total *= per_axis;
        return total;
    }

    // Decode a flat candidate index into a lattice point; returns false when
    // the point falls outside radius + cover_radius.
    bool decode(std::size_t idx, CVec& out) const {
        const int dim = 2 * n();
        const int side = steps_per_side();
        const std::size_t per_axis = 2 * static_cast<std::size_t>(side) + 1;
        double r2 = 0.0;
        std::vector<double> off(dim);
        for (int a = 0; a < dim; ++a) {
            int q = static_cast<int>(idx % per_axis) - side;
            idx /= per_axis;
            off[a] = q * spacing;
            r2 += off[a] * off[a];
        }
        double lim = ball.radius + cover_radius();
        if (r2 > lim * lim) return false;
        out = ball.center;
        for (int i = 0; i < n(); ++i)
            out[i] += Complex(off[2 * i], off[2 * i + 1]);
        return true;
    }

    // Serial visit in deterministic lattice order.
    template <typename Fn>
    void visit(Fn&& fn) const {
        CVec z(n());
        const std::size_t total = candidate_count();
        for (std::size_t idx = 0; idx < total; ++idx)
            if (decode(idx, z)) fn(z);
    }

    // Materialized point list (deterministic order).
    std::vector<CVec> points() const {
        std::vector<CVec> pts;
        visit([&](const CVec& z) { pts.push_back(z); });
        return pts;
    }

    // Parallel map over grid points: fn(point) -> double, results gathered in
    // lattice order. Reduction over the returned vector stays deterministic.
    std::vector<double> map_values(const std::function<double(const CVec&)>& fn) const {
        const std::size_t total = candidate_count();
        std::vector<double> vals(total, std::numeric_limits<double>::quiet_NaN());
        parallel_chunks(total, [&](std::size_t b, std::size_t e) {
            CVec z(n());
            for (std::size_t idx = b; idx < e; ++idx)
                if (decode(idx, z)) vals[idx] = fn(z);
        });
        std::vector<double> kept;
        kept.reserve(total);
        for (double v : vals)
            if (!std::isnan(v)) kept.push_back(v);
        return kept;
    }
};

}  // namespace tkit
