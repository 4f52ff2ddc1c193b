#include "tkit/branch_bound.hpp"

#include <algorithm>

namespace tkit {

namespace {

struct Cell {
    std::vector<double> center;  // 2n real coordinates
    double halfwidth;
    double lower;
    std::uint64_t id;  // insertion order, for deterministic heap ties
};

struct CellWorse {
    bool operator()(const Cell& a, const Cell& b) const {
        if (a.lower != b.lower) return a.lower > b.lower;
        return a.id > b.id;
    }
};

bool cell_meets_ball(const std::vector<double>& c, double h, const Ball& ball) {
    double d2 = 0.0;
    for (int i = 0; i < ball.n(); ++i) {
        double dr = std::abs(c[2 * i] - ball.center[i].real());
        double di = std::abs(c[2 * i + 1] - ball.center[i].imag());
        dr = std::max(0.0, dr - h);
        di = std::max(0.0, di - h);
        d2 += dr * dr + di * di;
    }
    return d2 <= ball.radius * ball.radius;
}

CVec to_point(const std::vector<double>& c, int n) {
    CVec z(n);
    for (int i = 0; i < n; ++i) z[i] = Complex(c[2 * i], c[2 * i + 1]);
    return z;
}

}  // namespace

CertifiedInf certified_inf(const InfObjective& obj, const Ball& ball, double target,
                           const BranchBoundOptions& opts) {
    const int n = ball.n();
    const int dim = 2 * n;
    const double sqrt_dim = std::sqrt(static_cast<double>(dim));

    std::priority_queue<Cell, std::vector<Cell>, CellWorse> heap;
    std::uint64_t next_id = 0;
    std::size_t cells = 0;

    auto push_cell = [&](std::vector<double> center, double h) {
        if (!cell_meets_ball(center, h, ball)) return;
        CVec z = to_point(center, n);
        double rho = h * sqrt_dim;
        double lo = obj.eval(z) - obj.lip(Ball{z, rho}) * rho;
        heap.push(Cell{std::move(center), h, lo, next_id++});
        ++cells;
    };

    // Root subdivision.
    {
        const int per = std::max(1, opts.initial_per_axis);
        const double h0 = ball.radius / per;
        std::vector<int> q(dim, 0);
        bool done = false;
        while (!done) {
            std::vector<double> c(dim);
            for (int a = 0; a < dim; ++a) {
                double base = (a % 2 == 0) ? ball.center[a / 2].real()
                                           : ball.center[a / 2].imag();
                c[a] = base + (2 * q[a] - per + 1) * h0;
            }
            push_cell(std::move(c), h0);
            int a = 0;
            while (a < dim && ++q[a] == per) q[a++] = 0;
            done = (a == dim);
        }
    }

    double frozen_min = std::numeric_limits<double>::infinity();
    CertifiedInf out;
    while (!heap.empty()) {
        const Cell top = heap.top();
        if (top.lower >= target) break;       // everything outstanding clears target
        if (cells >= opts.max_cells) break;   // budget exhausted
        heap.pop();
        if (top.halfwidth < opts.min_halfwidth) {
            frozen_min = std::min(frozen_min, top.lower);
            continue;
        }
        const double h = top.halfwidth / 2.0;
        for (int corner = 0; corner < (1 << dim); ++corner) {
            std::vector<double> c = top.center;
            for (int a = 0; a < dim; ++a)
                c[a] += ((corner >> a) & 1) ? h : -h;
            push_cell(std::move(c), h);
        }
    }

    double heap_min = heap.empty() ? target : heap.top().lower;
    out.bound = std::min(frozen_min, heap_min);
    out.reached_target = out.bound >= target;
    out.cells_used = cells;
    return out;
}

}  // namespace tkit
