#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "conveyorlab/error.hpp"

namespace cvl {

using cdouble = std::complex<double>;

// Real-coefficient polynomial in s, coefficients stored ascending by degree.
// An empty coefficient list is the zero polynomial.
struct Polynomial {
    std::vector<double> coeffs;

    Polynomial() = default;
    explicit Polynomial(std::vector<double> c) : coeffs(std::move(c)) {}

    static Polynomial zero() { return Polynomial{}; }
    static Polynomial constant(double c) { return Polynomial{{c}}; }

    bool is_zero() const {
        return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
    }

    // Index of the last nonzero coefficient, -1 for the zero polynomial.
    int degree() const {
        for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i)
            if (coeffs[static_cast<std::size_t>(i)] != 0.0) return i;
        return -1;
    }

    double leading() const {
        int d = degree();
        return d < 0 ? 0.0 : coeffs[static_cast<std::size_t>(d)];
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (double c : coeffs) m = std::max(m, std::abs(c));
        return m;
    }

    // Coefficient of s^i, 0 beyond the stored range.
    double coeff(std::size_t i) const { return i < coeffs.size() ? coeffs[i] : 0.0; }

    // Horner evaluation.
    cdouble operator()(cdouble s) const {
        cdouble acc = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * s + coeffs[i];
        return acc;
    }

    bool operator==(const Polynomial&) const = default;
};

// Zeroes every |c| < rel_tol * max|c| and strips trailing zeros, so the last
// stored coefficient is nonzero (or the list is empty).
inline Polynomial trimmed(Polynomial p, double rel_tol) {
    double floor = rel_tol * p.max_abs_coeff();
    for (double& c : p.coeffs)
        if (std::abs(c) < floor) c = 0.0;
    while (!p.coeffs.empty() && p.coeffs.back() == 0.0) p.coeffs.pop_back();
    return p;
}

inline Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.coeffs.empty() || b.coeffs.empty()) return Polynomial::zero();
    Polynomial r;
    r.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs.size(); ++j)
            r.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
    return r;
}

inline Polynomial operator*(const Polynomial& a, double k) {
    Polynomial r = a;
    for (double& c : r.coeffs) c *= k;
    return r;
}

inline Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    r.coeffs.assign(std::max(a.coeffs.size(), b.coeffs.size()), 0.0);
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] = a.coeff(i) + b.coeff(i);
    return r;
}

namespace detail {

// Both quadratic roots via the stable formula (large root first, mate by
// Vieta). Handles complex-conjugate pairs.
inline void quadratic_roots(double a, double b, double c, std::vector<cdouble>& out) {
    if (c == 0.0) {
        out.push_back(0.0);
        out.push_back(-b / a);
        return;
    }
    cdouble sd = std::sqrt(cdouble(b * b - 4.0 * a * c));
    if (b * sd.real() < 0.0) sd = -sd;
    cdouble q = -0.5 * (b + sd);
    if (q == cdouble(0.0)) { // b == 0 and discriminant == 0
        out.push_back(0.0);
        out.push_back(0.0);
        return;
    }
    out.push_back(q / a);
    out.push_back(c / q);
}

// Durand-Kerner iteration for degree >= 3. Fine at the tiny degrees seen
// here; multiple roots converge to sqrt(eps) accuracy like any
// coefficient-based method.
inline void durand_kerner(const std::vector<double>& monic, std::vector<cdouble>& out) {
    std::size_t n = monic.size() - 1; // degree
    double radius = 0.0;
    for (std::size_t i = 0; i < n; ++i) radius = std::max(radius, std::abs(monic[i]));
    radius = 1.0 + radius;

    std::vector<cdouble> x(n);
    cdouble seed(0.4, 0.9);
    cdouble p = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        p *= seed;
        x[k] = radius * p;
    }

    auto eval = [&](cdouble s) {
        cdouble acc = 1.0;
        for (std::size_t i = n; i-- > 0;) acc = acc * s + monic[i];
        return acc;
    };

    for (int iter = 0; iter < 500; ++iter) {
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            cdouble d = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) d *= x[k] - x[j];
            if (d == cdouble(0.0)) d = 1e-30;
            cdouble step = eval(x[k]) / d;
            x[k] -= step;
            worst = std::max(worst, std::abs(step) / (1.0 + std::abs(x[k])));
        }
        if (worst < 1e-14) break;
    }
    out.insert(out.end(), x.begin(), x.end());
}

} // namespace detail

// All complex roots of p (degree many). Degree <= 2 uses closed forms.
inline std::vector<cdouble> roots(const Polynomial& p) {
    int deg = p.degree();
    std::vector<cdouble> r;
    if (deg < 1) return r;

    // strip leading structural zeros: roots at the origin
    std::size_t low = 0;
    while (p.coeffs[low] == 0.0) {
        r.push_back(0.0);
        ++low;
    }
    std::vector<double> c(p.coeffs.begin() + static_cast<std::ptrdiff_t>(low),
                          p.coeffs.begin() + deg + 1);
    std::size_t n = c.size() - 1;
    if (n == 0) return r;
    if (n == 1) {
        r.push_back(-c[0] / c[1]);
        return r;
    }
    if (n == 2) {
        detail::quadratic_roots(c[2], c[1], c[0], r);
        return r;
    }
    for (double& ci : c) ci /= c[n];
    detail::durand_kerner(c, r);
    return r;
}

// Real-coefficient polynomial with the given leading coefficient and roots.
// Imaginary residue from unpaired conjugates is dropped.
inline Polynomial from_roots(double leading, const std::vector<cdouble>& rs) {
    std::vector<cdouble> c{leading}; // ascending
    for (cdouble root : rs) {
        c.push_back(0.0);
        for (std::size_t i = c.size() - 1; i > 0; --i) c[i] = c[i - 1] - root * c[i];
        c[0] = -root * c[0];
    }
    Polynomial p;
    p.coeffs.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) p.coeffs[i] = c[i].real();
    return p;
}

} // namespace cvl
