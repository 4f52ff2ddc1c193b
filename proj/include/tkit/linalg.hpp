#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <optional>
#include <stdexcept>

namespace tkit {

// Smallest singular value of an m x n complex matrix, m <= n. Zero exactly
// when the matrix is not surjective.
inline double min_singular_value(const Eigen::MatrixXcd& L) {
    const auto m = L.rows(), n = L.cols();
    if (m > n) throw std::invalid_argument("min_singular_value: m > n unsupported");
    if (m == 1) return L.row(0).norm();
    if (m == 2) {
        Eigen::Matrix2cd G = L * L.adjoint();
        double tr = G.trace().real();
        double det = (G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0)).real();
        double disc = std::max(0.0, tr * tr / 4.0 - det);
        double lam = tr / 2.0 - std::sqrt(disc);
        return std::sqrt(std::max(0.0, lam));
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(L);
    return svd.singularValues().minCoeff();
}

// Spectral norm (largest singular value), any shape.
inline double spectral_norm(const Eigen::MatrixXcd& L) {
    const auto m = L.rows(), n = L.cols();
    if (m == 1 || n == 1) return L.norm();
    if (m == 2 && n >= 2) {
        Eigen::Matrix2cd G = L * L.adjoint();
        double tr = G.trace().real();
        double det = (G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0)).real();
        double disc = std::max(0.0, tr * tr / 4.0 - det);
        return std::sqrt(std::max(0.0, tr / 2.0 + std::sqrt(disc)));
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(L);
    return svd.singularValues().maxCoeff();
}

// Right inverse R = L^* (L L^*)^{-1} when the smallest singular value
// clears alpha; otherwise a rejection carrying that singular value.
// Rejection is an expected outcome, not a fault.
struct RightInverse {
    bool ok = false;
    double sigma_min = 0.0;
    Eigen::MatrixXcd R;  // valid iff ok
};

inline RightInverse right_inverse(const Eigen::MatrixXcd& L, double alpha) {
    if (L.rows() > L.cols())
        throw std::invalid_argument("right_inverse: m > n unsupported");
    if (alpha <= 0) throw std::invalid_argument("right_inverse: alpha must be positive");
    RightInverse out;
    out.sigma_min = min_singular_value(L);
    if (out.sigma_min < alpha) return out;
    Eigen::MatrixXcd gram = L * L.adjoint();
    out.R = L.adjoint() * gram.inverse();
    out.ok = true;
    return out;
}

}  // namespace tkit
