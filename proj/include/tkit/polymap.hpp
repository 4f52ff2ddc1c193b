#pragma once

#include <Eigen/Dense>
#include <map>
#include <stdexcept>
#include <vector>

#include "tkit/geometry.hpp"
#include "tkit/multi_index.hpp"

namespace tkit {

// Value and first Wirtinger derivatives of a map C^n -> C^m at a point.
// dz(j,i) = d f_j / d z_i, dzbar(j,i) = d f_j / d zbar_i.
struct JetSample {
    CVec point;
    CVec value;
    CMat dz;
    CMat dzbar;

    int n() const { return static_cast<int>(point.size()); }
    int m() const { return static_cast<int>(value.size()); }
};

// Polynomial map C^n -> C^m in mixed (z, zbar) monomials with vector
// coefficients. Coefficients below a relative tolerance of 1e-14 are
// dropped on normalization, so stored terms are meaningfully nonzero.
class PolyMap {
  public:
    static constexpr double kCoeffTol = 1e-14;

    PolyMap() : n_(0), m_(0) {}
    PolyMap(int n, int m) : n_(n), m_(m) {
        if (n < 0 || m <= 0) throw std::invalid_argument("PolyMap dims");
    }

    int n() const { return n_; }
    int m() const { return m_; }
    const std::map<MultiIndex, CVec>& coeffs() const { return coeffs_; }

    bool empty() const { return coeffs_.empty(); }
    int degree() const;
    bool purely_holomorphic() const;

    // Accumulate c into the coefficient of idx.
    void add_term(const MultiIndex& idx, const CVec& c);
    void add_term(const MultiIndex& idx, const Complex& c);  // m == 1
    CVec coefficient(const MultiIndex& idx) const;

    // Drop coefficients with norm <= kCoeffTol * (largest coefficient norm).
    // Returns the sum of dropped coefficient norms for error accounting.
    double normalize();

    JetSample jet(const CVec& z) const;
    CVec operator()(const CVec& z) const { return jet(z).value; }

    PolyMap operator+(const PolyMap& o) const;
    PolyMap operator-(const PolyMap& o) const;
    PolyMap scaled(const Complex& s) const;

    // Multiplication by the coordinate monomial z_i.
    PolyMap mul_z(int i) const;

    // Wirtinger derivatives.
    PolyMap d_z(int i) const;
    PolyMap d_zbar(int i) const;

    PolyMap component(int j) const;
    // Stack maps with identical n into one map with summed m.
    static PolyMap stack(const std::vector<PolyMap>& parts);

    // All first z-derivatives stacked into one map with m*n components,
    // ordered (j,i) row-major; likewise for zbar. These drive Lipschitz
    // bounds for jacobian-dependent quantities.
    PolyMap dz_stack() const;
    PolyMap dzbar_stack() const;

    // Affine shift f - w0 - sum_i w_i z_i, with w packed as m*(n+1) values
    // [w0 | w1 | ... | wn].
    PolyMap affine_shift(const CVec& w_packed) const;

    static PolyMap constant(int n, const CVec& value);
    static PolyMap coordinate(int n, int i);  // z_i as a scalar map

  private:
    int n_, m_;
    std::map<MultiIndex, CVec> coeffs_;
};

PolyMap evaluate_jet_check(const PolyMap& p, const CVec& z);  // dim guard helper

// Exact polynomial evaluation of value and both Wirtinger jacobians.
JetSample evaluate_jet(const PolyMap& p, const CVec& z);

}  // namespace tkit
