#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "conveyorlab/error.hpp"
#include "conveyorlab/polynomial.hpp"
#include "conveyorlab/tf.hpp"

namespace cvl {

// Component set of the built-in voltage-mode multifunction biquad: two
// current conveyors, one OTA, four resistors and two grounded capacitors.
// One output node; the response class is chosen by which input terminal is
// driven.
struct FilterComponents {
    double r1; // ohm
    double r3; // ohm
    double r4; // ohm
    double r6; // ohm
    double c2; // farad
    double c5; // farad
    double gm; // siemens

    bool operator==(const FilterComponents&) const = default;
};

inline void validate(const FilterComponents& p) {
    if (!(p.r1 > 0 && p.r3 > 0 && p.r4 > 0 && p.r6 > 0 && p.c2 > 0 && p.c5 > 0 && p.gm > 0))
        throw std::invalid_argument("filter components must all be positive");
}

// Stock design values shipped with the tool: R1=R4=R6=10k, C2=C5=10n,
// R3=14k, gm=13.2m.
inline FilterComponents reference_design() {
    return {1.0e4, 1.4e4, 1.0e4, 1.0e4, 1.0e-8, 1.0e-8, 1.32e-2};
}

// Which input terminal is driven (the rest grounded). notch drives the
// low-pass and high-pass inputs together.
enum class InputSelect { low_pass, high_pass, band_pass, notch };

enum class FilterClass { low_pass, high_pass, band_pass, notch, general };

struct BiquadParams {
    double w0;        // rad/s
    double q;         // dimensionless
    double bandwidth; // w0/q, rad/s
    FilterClass cls;
    std::optional<double> wz; // notch zero frequency, rad/s
};

// Shared denominator of every response:
//   D(s) = R3 + s C5 gm R1 R4 R6 + s^2 C2 C5 gm R1 R3 R4 R6
inline Polynomial multifunction_denominator(const FilterComponents& p) {
    validate(p);
    double a0 = p.r3;
    double a1 = p.c5 * p.gm * p.r1 * p.r4 * p.r6;
    double a2 = p.c2 * p.c5 * p.gm * p.r1 * p.r3 * p.r4 * p.r6;
    return Polynomial{{a0, a1, a2}};
}

// Numerator for the selected input. The band-pass s-coefficient defaults to
// C5 gm R1 R4 R6 (the denominator's s-coefficient), which makes the
// center-frequency gain unity, consistent with the low-pass and high-pass
// passband gains; pass bp_gain to override.
inline Polynomial multifunction_numerator(const FilterComponents& p, InputSelect sel,
                                          std::optional<double> bp_gain = std::nullopt) {
    validate(p);
    double s2 = p.c2 * p.c5 * p.gm * p.r1 * p.r3 * p.r4 * p.r6;
    switch (sel) {
    case InputSelect::low_pass:
        return Polynomial{{p.r3}};
    case InputSelect::high_pass:
        return Polynomial{{0.0, 0.0, s2}};
    case InputSelect::notch:
        return Polynomial{{p.r3, 0.0, s2}};
    case InputSelect::band_pass: {
        double beta = bp_gain ? *bp_gain : p.c5 * p.gm * p.r1 * p.r4 * p.r6;
        return Polynomial{{0.0, beta}};
    }
    }
    throw std::invalid_argument("unknown input selection");
}

inline const char* to_string(InputSelect sel) {
    switch (sel) {
    case InputSelect::low_pass: return "lp";
    case InputSelect::high_pass: return "hp";
    case InputSelect::band_pass: return "bp";
    case InputSelect::notch: return "notch";
    }
    return "?";
}

inline const char* to_string(FilterClass c) {
    switch (c) {
    case FilterClass::low_pass: return "low_pass";
    case FilterClass::high_pass: return "high_pass";
    case FilterClass::band_pass: return "band_pass";
    case FilterClass::notch: return "notch";
    case FilterClass::general: return "general";
    }
    return "?";
}

inline TransferFunction multifunction_filter(const FilterComponents& p, InputSelect sel,
                                             std::optional<double> bp_gain = std::nullopt) {
    return TransferFunction{multifunction_numerator(p, sel, bp_gain),
                            multifunction_denominator(p), std::string("V") + to_string(sel),
                            "out"};
}

// Relative tolerance for deciding that a numerator coefficient is
// structurally zero. Extraction noise sits near 1e-12, leaving a decade of
// margin.
inline constexpr double kClassifyRelTol = 1e-9;

// Pole parameters of a second-order transfer function:
//   w0 = sqrt(a0/a2), Q = sqrt(a0 a2)/a1, bandwidth = w0/Q = a1/a2.
// The sign is normalized so a2 > 0 first; all three coefficients must then
// be positive. The class comes from the numerator zero pattern.
inline BiquadParams characterize(const TransferFunction& tf) {
    if (tf.den.degree() != 2)
        throw analysis_error("characterize: denominator degree " +
                             std::to_string(tf.den.degree()) + ", need 2");
    if (tf.num.degree() > 2)
        throw analysis_error("characterize: numerator degree exceeds 2");

    double sign = tf.den.coeff(2) < 0.0 ? -1.0 : 1.0;
    double a0 = sign * tf.den.coeff(0);
    double a1 = sign * tf.den.coeff(1);
    double a2 = sign * tf.den.coeff(2);
    if (!(a0 > 0 && a1 > 0 && a2 > 0))
        throw analysis_error("characterize: non-positive denominator coefficient "
                             "(unstable or degenerate biquad)");

    double b0 = sign * tf.num.coeff(0);
    double b1 = sign * tf.num.coeff(1);
    double b2 = sign * tf.num.coeff(2);

    BiquadParams bp;
    bp.w0 = std::sqrt(a0 / a2);
    bp.q = std::sqrt(a0 * a2) / a1;
    bp.bandwidth = a1 / a2;

    double tol = kClassifyRelTol * std::max({std::abs(b0), std::abs(b1), std::abs(b2)});
    auto near_zero = [&](double b) { return std::abs(b) <= tol; };

    if (tol == 0.0)
        bp.cls = FilterClass::general; // identically zero numerator
    else if (near_zero(b2) && near_zero(b1))
        bp.cls = FilterClass::low_pass;
    else if (near_zero(b1) && near_zero(b0))
        bp.cls = FilterClass::high_pass;
    else if (near_zero(b2) && near_zero(b0))
        bp.cls = FilterClass::band_pass;
    else if (near_zero(b1) && b2 > tol && b0 > tol) {
        bp.cls = FilterClass::notch;
        bp.wz = std::sqrt(b0 / b2);
    } else
        bp.cls = FilterClass::general;
    return bp;
}

} // namespace cvl
