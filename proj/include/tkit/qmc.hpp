#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace tkit {

// Low-discrepancy points in a complex ball: additive-recurrence (generalized
// golden ratio) sequence with a seeded rotation, radius via u^(1/dim) and
// direction via Box-Muller pairs, so points equidistribute over the ball.
class BallSequence {
  public:
    // ambient: complex dimension; ball has real dimension 2*ambient.
    BallSequence(int ambient, double radius, std::uint64_t seed)
        : dim_(2 * ambient), radius_(radius), index_(0) {
        const int d = dim_ + 1;
        double phi = 1.5;
        for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (d + 1));
        alpha_.resize(d);
        rot_.resize(d);
        double a = 1.0;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int j = 0; j < d; ++j) {
            a /= phi;
            alpha_[j] = a;
            rot_[j] = uni(rng);
        }
    }

    Eigen::VectorXcd next() {
        ++index_;
        const int d = dim_ + 1;
        std::vector<double> u(d);
        for (int j = 0; j < d; ++j) {
            double v = rot_[j] + index_ * alpha_[j];
            u[j] = v - std::floor(v);
        }
        double r = radius_ * std::pow(std::max(u[0], 1e-16), 1.0 / dim_);
        std::vector<double> g(dim_);
        for (int j = 0; j < dim_; j += 2) {
            double a = std::max(u[1 + j], 1e-16);
            double b = u[2 + j];
            double mag = std::sqrt(-2.0 * std::log(a));
            g[j] = mag * std::cos(2.0 * M_PI * b);
            g[j + 1] = mag * std::sin(2.0 * M_PI * b);
        }
        double norm = 0.0;
        for (double x : g) norm += x * x;
        norm = std::sqrt(std::max(norm, 1e-300));
        Eigen::VectorXcd out(dim_ / 2);
        for (int i = 0; i < dim_ / 2; ++i)
            out[i] = std::complex<double>(g[2 * i], g[2 * i + 1]) * (r / norm);
        return out;
    }

  private:
    int dim_;
    double radius_;
    std::uint64_t index_;
    std::vector<double> alpha_;
    std::vector<double> rot_;
};

}  // namespace tkit
