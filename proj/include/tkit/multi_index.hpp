#pragma once

#include <numeric>
#include <vector>

namespace tkit {

// Exponent vector of a mixed monomial z^a zbar^b on C^n, stored as
// [a_1..a_n, b_1..b_n]. Length is fixed at 2n by the owning map.
class MultiIndex {
  public:
    MultiIndex() = default;
    explicit MultiIndex(int n) : e_(2 * n, 0) {}
    MultiIndex(std::vector<int> z, std::vector<int> zbar) {
        e_ = z;
        e_.insert(e_.end(), zbar.begin(), zbar.end());
    }

    int n() const { return static_cast<int>(e_.size()) / 2; }
    int zexp(int i) const { return e_[i]; }
    int zbarexp(int i) const { return e_[n() + i]; }
    int& zexp(int i) { return e_[i]; }
    int& zbarexp(int i) { return e_[n() + i]; }

    int degree() const { return std::accumulate(e_.begin(), e_.end(), 0); }
    int z_degree() const {
        return std::accumulate(e_.begin(), e_.begin() + n(), 0);
    }
    int zbar_degree() const { return degree() - z_degree(); }
    bool holomorphic() const { return zbar_degree() == 0; }

    const std::vector<int>& raw() const { return e_; }

    bool operator<(const MultiIndex& o) const { return e_ < o.e_; }
    bool operator==(const MultiIndex& o) const { return e_ == o.e_; }

  private:
    std::vector<int> e_;
};

}  // namespace tkit
