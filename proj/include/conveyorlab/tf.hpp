#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "conveyorlab/error.hpp"
#include "conveyorlab/polynomial.hpp"

namespace cvl {

// Rational transfer function H(s) = num(s)/den(s) from one driving source to
// one output node. num and den are unique up to a common positive scale, so
// consumers must compare coefficient ratios, never absolutes.
struct TransferFunction {
    Polynomial num;
    Polynomial den;
    std::string source;
    std::string out_node;

    bool operator==(const TransferFunction&) const = default;
};

inline cdouble eval_tf(const TransferFunction& tf, cdouble s) {
    cdouble d = tf.den(s);
    if (std::abs(d) < 1e-300)
        throw analysis_error("transfer function pole at the requested frequency");
    return tf.num(s) / d;
}

// Cancels numerator/denominator root pairs that agree within relative tol,
// rebuilding real-coefficient polynomials from the surviving roots. Purely
// best effort: no-op when nothing matches, and cancellation that splits a
// conjugate pair leaves a small imaginary residue that is dropped.
inline TransferFunction reduce(const TransferFunction& tf, double tol) {
    if (!(tol > 0.0 && tol <= 1e-3))
        throw std::invalid_argument("reduce: tol must lie in (0, 1e-3]");
    if (tf.num.degree() < 1 || tf.den.degree() < 1) return tf;

    std::vector<cdouble> rn = roots(tf.num);
    std::vector<cdouble> rd = roots(tf.den);

    double root_scale = 0.0;
    for (cdouble r : rn) root_scale = std::max(root_scale, std::abs(r));
    for (cdouble r : rd) root_scale = std::max(root_scale, std::abs(r));

    auto match = [&](cdouble a, cdouble b) {
        double m = std::abs(a - b);
        if (m <= tol * std::max(std::abs(a), std::abs(b))) return true;
        // both essentially at the origin relative to the root cloud
        return std::abs(a) <= tol * root_scale && std::abs(b) <= tol * root_scale;
    };

    std::vector<bool> num_used(rn.size(), false), den_used(rd.size(), false);
    bool any = false;
    for (std::size_t i = 0; i < rn.size(); ++i) {
        for (std::size_t j = 0; j < rd.size(); ++j) {
            if (den_used[j] || !match(rn[i], rd[j])) continue;
            num_used[i] = den_used[j] = true;
            any = true;
            break;
        }
    }
    if (!any) return tf;

    std::vector<cdouble> keep_n, keep_d;
    for (std::size_t i = 0; i < rn.size(); ++i)
        if (!num_used[i]) keep_n.push_back(rn[i]);
    for (std::size_t j = 0; j < rd.size(); ++j)
        if (!den_used[j]) keep_d.push_back(rd[j]);

    TransferFunction out = tf;
    out.num = from_roots(tf.num.leading(), keep_n);
    out.den = from_roots(tf.den.leading(), keep_d);
    return out;
}

} // namespace cvl
