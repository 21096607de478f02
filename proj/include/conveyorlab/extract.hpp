#pragma once

#include <algorithm>
#include <cmath>
#include <string_view>
#include <vector>

#include "conveyorlab/mna.hpp"
#include "conveyorlab/tf.hpp"

namespace cvl {

// Interpolation coefficients below this fraction of the largest one are
// treated as exact zeros (the sampling noise floor is orders of magnitude
// lower).
inline constexpr double kExtractTrimRelTol = 1e-9;

namespace detail {

// Exact polynomial through (xs[k], ys[k]) by accumulating Lagrange basis
// polynomials; degree = xs.size()-1 before trimming.
inline Polynomial lagrange_interpolate(const std::vector<double>& xs,
                                       const std::vector<double>& ys) {
    Polynomial acc = Polynomial::zero();
    for (std::size_t k = 0; k < xs.size(); ++k) {
        Polynomial basis = Polynomial::constant(1.0);
        double w = 1.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i == k) continue;
            basis = basis * Polynomial{{-xs[i], 1.0}};
            w *= xs[k] - xs[i];
        }
        acc = acc + basis * (ys[k] / w);
    }
    return acc;
}

// Characteristic frequency used to scale sample points: 1/median(R*C) over
// every resistor-capacitor value pair. Decks without resistors fall back to
// OTA 1/gm as the resistance scale; without any R-C pair at all the scale
// is 1.
inline double characteristic_frequency(const Netlist& nl) {
    std::vector<double> rvals, gvals, cvals;
    for (const Element& e : nl.elements) {
        if (const Resistor* r = std::get_if<Resistor>(&e)) rvals.push_back(r->ohms);
        else if (const Capacitor* c = std::get_if<Capacitor>(&e)) cvals.push_back(c->farads);
        else if (const Ota* o = std::get_if<Ota>(&e)) gvals.push_back(1.0 / o->gm);
    }
    if (rvals.empty()) rvals = gvals;
    if (rvals.empty() || cvals.empty()) return 1.0;

    std::vector<double> rc;
    rc.reserve(rvals.size() * cvals.size());
    for (double r : rvals)
        for (double c : cvals) rc.push_back(r * c);
    std::sort(rc.begin(), rc.end());
    std::size_t n = rc.size();
    double median = (n % 2) ? rc[n / 2] : 0.5 * (rc[n / 2 - 1] + rc[n / 2]);
    return 1.0 / median;
}

} // namespace detail

// Recovers H(s) = N(s)/D(s) exactly via Cramer's rule: with b the source
// vector and A(s) the MNA matrix, V_out(s) = det(A_out<-b(s)) / det(A(s)),
// and both determinants are polynomials of degree <= nC (each capacitor
// contributes one rank-one s-dependent stamp). Both are evaluated at nC+1
// real positive frequencies, log-spaced over [0.01, 100] times the
// characteristic frequency, and interpolated. The result is unique up to a
// common positive scale, normalized so max|den coeff| = 1 and the leading
// denominator coefficient is positive.
inline TransferFunction extract_tf(const Netlist& nl, std::string_view active_source) {
    const VSource* src = nl.find_source(active_source);
    if (!src)
        throw std::invalid_argument("unknown source '" + std::string(active_source) + "'");
    if (src->amplitude == 0.0)
        throw analysis_error("active source '" + src->name + "' has zero amplitude");

    TransferFunction tf;
    tf.source = std::string(active_source);
    tf.out_node = nl.out_node;
    if (nl.out_node == "0") {
        tf.num = Polynomial::zero();
        tf.den = Polynomial::constant(1.0);
        return tf;
    }

    std::size_t nc = 0;
    for (const Element& e : nl.elements)
        if (std::holds_alternative<Capacitor>(e)) ++nc;
    std::size_t m = nc + 1;

    double sstar = detail::characteristic_frequency(nl);

    std::vector<double> base(m, 1.0);
    if (m > 1)
        for (std::size_t k = 0; k < m; ++k)
            base[k] = std::pow(10.0, -2.0 + 4.0 * static_cast<double>(k) /
                                          static_cast<double>(m - 1));

    // det(A(s_k)) = 0 means a pole sits on a sample point; retry on a
    // deterministically jittered grid before giving up.
    std::vector<double> taus(m), nvals(m), dvals(m);
    bool sampled = false;
    for (int attempt = 0; attempt <= 3 && !sampled; ++attempt) {
        double widen = std::pow(1.29, attempt);
        sampled = true;
        for (std::size_t k = 0; k < m; ++k) {
            taus[k] = base[k] * widen * std::pow(1.013, attempt * static_cast<int>(k + 1));
            LinearSystem sys = assemble(nl, active_source, cdouble(taus[k] * sstar, 0.0));
            cdouble d = determinant(sys.matrix);
            if (d == cdouble(0.0)) {
                sampled = false;
                break;
            }
            CMatrix swapped = sys.matrix;
            std::size_t out_col = static_cast<std::size_t>(sys.node_index.at(nl.out_node));
            for (std::size_t i = 0; i < sys.rhs.size(); ++i) swapped.at(i, out_col) = sys.rhs[i];
            // real sample points keep the whole computation in the reals
            dvals[k] = d.real();
            nvals[k] = determinant(swapped).real();
        }
    }
    if (!sampled)
        throw analysis_error("extraction failed: singular system at every sample grid");

    Polynomial num = trimmed(detail::lagrange_interpolate(taus, nvals), kExtractTrimRelTol);
    Polynomial den = trimmed(detail::lagrange_interpolate(taus, dvals), kExtractTrimRelTol);
    if (den.is_zero())
        throw analysis_error("extraction failed: denominator vanished after trimming");

    // interpolation ran in tau = s/s*; map coefficients back to s
    for (std::size_t j = 0; j < num.coeffs.size(); ++j)
        num.coeffs[j] /= std::pow(sstar, static_cast<double>(j));
    for (std::size_t j = 0; j < den.coeffs.size(); ++j)
        den.coeffs[j] /= std::pow(sstar, static_cast<double>(j));

    // H = V_out / amplitude
    for (double& c : num.coeffs) c /= src->amplitude;

    double scale = den.max_abs_coeff() * (den.leading() < 0.0 ? -1.0 : 1.0);
    for (double& c : num.coeffs) c /= scale;
    for (double& c : den.coeffs) c /= scale;

    if (num.degree() > static_cast<int>(nc) || den.degree() > static_cast<int>(nc))
        throw analysis_error("extraction degree bound violated");

    tf.num = num;
    tf.den = den;
    return tf;
}

} // namespace cvl
