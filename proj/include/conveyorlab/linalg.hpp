#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "conveyorlab/error.hpp"
#include "conveyorlab/polynomial.hpp" // cdouble

namespace cvl {

// Dense square complex matrix, row major. Circuits here have at most a few
// dozen unknowns, so no sparse machinery.
class CMatrix {
public:
    CMatrix() = default;
    explicit CMatrix(std::size_t n) : n_(n), a_(n * n, cdouble(0.0)) {}

    std::size_t size() const { return n_; }
    cdouble& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const cdouble& at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    double max_abs() const {
        double m = 0.0;
        for (const cdouble& v : a_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t n_ = 0;
    std::vector<cdouble> a_;
};

inline std::vector<cdouble> mat_vec(const CMatrix& a, const std::vector<cdouble>& x) {
    std::size_t n = a.size();
    std::vector<cdouble> y(n, cdouble(0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) y[i] += a.at(i, j) * x[j];
    return y;
}

inline double inf_norm(const std::vector<cdouble>& v) {
    double m = 0.0;
    for (const cdouble& e : v) m = std::max(m, std::abs(e));
    return m;
}

// Relative pivot floor separating true floating-node singularities from
// conditioning noise at this problem scale.
inline constexpr double kSingularPivotRel = 1e-13;

// LU solve with partial pivoting, in place on copies. Throws analysis_error
// when a pivot falls under kSingularPivotRel times the largest entry of a.
inline std::vector<cdouble> lu_solve(CMatrix a, std::vector<cdouble> b) {
    std::size_t n = a.size();
    double floor = kSingularPivotRel * a.max_abs();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a.at(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            double m = std::abs(a.at(i, k));
            if (m > best) {
                best = m;
                piv = i;
            }
        }
        if (best < floor || best == 0.0)
            throw analysis_error("singular system: floating node or degenerate topology");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            cdouble f = a.at(i, k) / a.at(k, k);
            if (f == cdouble(0.0)) continue;
            a.at(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) a.at(i, j) -= f * a.at(k, j);
            b[i] -= f * b[k];
        }
    }
    // back substitution
    std::vector<cdouble> x(n);
    for (std::size_t i = n; i-- > 0;) {
        cdouble s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a.at(i, j) * x[j];
        x[i] = s / a.at(i, i);
    }
    return x;
}

// Determinant as the signed product of LU pivots. An exactly zero pivot
// column means det = 0; small pivots are legitimate values here, so no
// relative floor applies.
inline cdouble determinant(CMatrix a) {
    std::size_t n = a.size();
    if (n == 0) return cdouble(1.0);
    cdouble det(1.0);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a.at(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            double m = std::abs(a.at(i, k));
            if (m > best) {
                best = m;
                piv = i;
            }
        }
        if (best == 0.0) return cdouble(0.0);
        if (piv != k) {
            for (std::size_t j = k; j < n; ++j) std::swap(a.at(k, j), a.at(piv, j));
            det = -det;
        }
        det *= a.at(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            cdouble f = a.at(i, k) / a.at(k, k);
            if (f == cdouble(0.0)) continue;
            for (std::size_t j = k + 1; j < n; ++j) a.at(i, j) -= f * a.at(k, j);
        }
    }
    return det;
}

} // namespace cvl
