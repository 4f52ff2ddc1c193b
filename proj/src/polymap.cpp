#include "tkit/polymap.hpp"

#include <algorithm>
#include <cmath>

namespace tkit {

int PolyMap::degree() const {
    int d = 0;
    for (const auto& [idx, c] : coeffs_) d = std::max(d, idx.degree());
    return d;
}

bool PolyMap::purely_holomorphic() const {
    for (const auto& [idx, c] : coeffs_)
        if (idx.zbar_degree() > 0) return false;
    return true;
}

void PolyMap::add_term(const MultiIndex& idx, const CVec& c) {
    if (idx.n() != n_) throw std::invalid_argument("multi-index arity mismatch");
    if (c.size() != m_) throw std::invalid_argument("coefficient arity mismatch");
    auto it = coeffs_.find(idx);
    if (it == coeffs_.end())
        coeffs_.emplace(idx, c);
    else
        it->second += c;
}

void PolyMap::add_term(const MultiIndex& idx, const Complex& c) {
    CVec v(1);
    v[0] = c;
    add_term(idx, v);
}

CVec PolyMap::coefficient(const MultiIndex& idx) const {
    auto it = coeffs_.find(idx);
    if (it == coeffs_.end()) return CVec::Zero(m_);
    return it->second;
}

double PolyMap::normalize() {
    double biggest = 0.0;
    for (const auto& [idx, c] : coeffs_) biggest = std::max(biggest, c.norm());
    double dropped = 0.0;
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
        if (it->second.norm() <= kCoeffTol * biggest) {
            dropped += it->second.norm();
            it = coeffs_.erase(it);
        } else {
            ++it;
        }
    }
    return dropped;
}

JetSample PolyMap::jet(const CVec& z) const { return evaluate_jet(*this, z); }

PolyMap PolyMap::operator+(const PolyMap& o) const {
    if (n_ != o.n_ || m_ != o.m_) throw std::invalid_argument("PolyMap shape mismatch");
    PolyMap r = *this;
    for (const auto& [idx, c] : o.coeffs_) r.add_term(idx, c);
    r.normalize();
    return r;
}

PolyMap PolyMap::operator-(const PolyMap& o) const { return *this + o.scaled(-1.0); }

PolyMap PolyMap::scaled(const Complex& s) const {
    PolyMap r(n_, m_);
    for (const auto& [idx, c] : coeffs_) r.coeffs_[idx] = c * s;
    r.normalize();
    return r;
}

PolyMap PolyMap::mul_z(int i) const {
    PolyMap r(n_, m_);
    for (const auto& [idx, c] : coeffs_) {
        MultiIndex shifted = idx;
        shifted.zexp(i) += 1;
        r.coeffs_[shifted] = c;
    }
    return r;
}

PolyMap PolyMap::d_z(int i) const {
    PolyMap r(n_, m_);
    for (const auto& [idx, c] : coeffs_) {
        int e = idx.zexp(i);
        if (e == 0) continue;
        MultiIndex lowered = idx;
        lowered.zexp(i) -= 1;
        r.add_term(lowered, CVec(c * static_cast<double>(e)));
    }
    return r;
}

PolyMap PolyMap::d_zbar(int i) const {
    PolyMap r(n_, m_);
    for (const auto& [idx, c] : coeffs_) {
        int e = idx.zbarexp(i);
        if (e == 0) continue;
        MultiIndex lowered = idx;
        lowered.zbarexp(i) -= 1;
        r.add_term(lowered, CVec(c * static_cast<double>(e)));
    }
    return r;
}

PolyMap PolyMap::component(int j) const {
    PolyMap r(n_, 1);
    for (const auto& [idx, c] : coeffs_) {
        if (std::abs(c[j]) == 0.0) continue;
        CVec v(1);
        v[0] = c[j];
        r.coeffs_[idx] = v;
    }
    return r;
}

PolyMap PolyMap::stack(const std::vector<PolyMap>& parts) {
    if (parts.empty()) throw std::invalid_argument("stack of nothing");
    int n = parts[0].n();
    int m = 0;
    for (const auto& p : parts) {
        if (p.n() != n) throw std::invalid_argument("stack arity mismatch");
        m += p.m();
    }
    PolyMap r(n, m);
    int row = 0;
    for (const auto& p : parts) {
        for (const auto& [idx, c] : p.coeffs_) {
            auto it = r.coeffs_.find(idx);
            if (it == r.coeffs_.end()) it = r.coeffs_.emplace(idx, CVec::Zero(m)).first;
            it->second.segment(row, p.m()) += c;
        }
        row += p.m();
    }
    r.normalize();
    return r;
}

PolyMap PolyMap::dz_stack() const {
    std::vector<PolyMap> parts;
    for (int j = 0; j < m_; ++j)
        for (int i = 0; i < n_; ++i) parts.push_back(component(j).d_z(i));
    return stack(parts);
}

PolyMap PolyMap::dzbar_stack() const {
    std::vector<PolyMap> parts;
    for (int j = 0; j < m_; ++j)
        for (int i = 0; i < n_; ++i) parts.push_back(component(j).d_zbar(i));
    return stack(parts);
}

PolyMap PolyMap::affine_shift(const CVec& w_packed) const {
    if (w_packed.size() != static_cast<Eigen::Index>(m_ * (n_ + 1)))
        throw std::invalid_argument("affine offset must have m*(n+1) entries");
    PolyMap r = *this;
    r.add_term(MultiIndex(n_), CVec(-w_packed.segment(0, m_)));
    for (int i = 0; i < n_; ++i) {
        MultiIndex zi(n_);
        zi.zexp(i) = 1;
        r.add_term(zi, CVec(-w_packed.segment(m_ * (i + 1), m_)));
    }
    r.normalize();
    return r;
}

PolyMap PolyMap::constant(int n, const CVec& value) {
    PolyMap r(n, static_cast<int>(value.size()));
    r.add_term(MultiIndex(n), value);
    return r;
}

PolyMap PolyMap::coordinate(int n, int i) {
    PolyMap r(n, 1);
    MultiIndex idx(n);
    idx.zexp(i) = 1;
    CVec one(1);
    one[0] = 1.0;
    r.add_term(idx, one);
    return r;
}

JetSample evaluate_jet(const PolyMap& p, const CVec& z) {
    if (z.size() != p.n()) throw std::invalid_argument("point arity mismatch");
    for (int i = 0; i < p.n(); ++i)
        if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag()))
            throw std::invalid_argument("point must be finite");

    const int n = p.n(), m = p.m();
    JetSample out;
    out.point = z;
    out.value = CVec::Zero(m);
    out.dz = CMat::Zero(m, n);
    out.dzbar = CMat::Zero(m, n);

    // Power tables up to the map degree.
    const int deg = p.degree();
    std::vector<std::vector<Complex>> zp(n), zbp(n);
    for (int i = 0; i < n; ++i) {
        zp[i].resize(deg + 1);
        zbp[i].resize(deg + 1);
        zp[i][0] = zbp[i][0] = 1.0;
        Complex zc = z[i], zb = std::conj(z[i]);
        for (int e = 1; e <= deg; ++e) {
            zp[i][e] = zp[i][e - 1] * zc;
            zbp[i][e] = zbp[i][e - 1] * zb;
        }
    }

    for (const auto& [idx, c] : p.coeffs()) {
        Complex mono = 1.0;
        for (int i = 0; i < n; ++i)
            mono *= zp[i][idx.zexp(i)] * zbp[i][idx.zbarexp(i)];
        out.value += c * mono;

        for (int i = 0; i < n; ++i) {
            int a = idx.zexp(i), b = idx.zbarexp(i);
            if (a > 0) {
                Complex dm = static_cast<double>(a) * zp[i][a - 1] * zbp[i][b];
                for (int k = 0; k < n; ++k)
                    if (k != i) dm *= zp[k][idx.zexp(k)] * zbp[k][idx.zbarexp(k)];
                out.dz.col(i) += c * dm;
            }
            if (b > 0) {
                Complex dm = static_cast<double>(b) * zp[i][a] * zbp[i][b - 1];
                for (int k = 0; k < n; ++k)
                    if (k != i) dm *= zp[k][idx.zexp(k)] * zbp[k][idx.zbarexp(k)];
                out.dzbar.col(i) += c * dm;
            }
        }
    }
    return out;
}

}  // namespace tkit
