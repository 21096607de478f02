#pragma once

#include <cmath>
#include <vector>

#include "conveyorlab/biquad.hpp"
#include "conveyorlab/error.hpp"

namespace cvl {

inline constexpr double kBoltzmann = 1.380649e-23;         // J/K
inline constexpr double kElementaryCharge = 1.602176634e-19; // C

// Default thermal voltage, 25.85 mV (300 K).
inline constexpr double kDefaultVt = 0.02585;

inline double thermal_voltage(double kelvin) {
    if (!(kelvin > 0)) throw std::invalid_argument("temperature must be positive");
    return kBoltzmann * kelvin / kElementaryCharge;
}

// OTA transconductance from its control bias current: gm = I_abc / (2 V_T).
inline double gm_from_bias(double i_abc, double vt) {
    if (!(i_abc > 0)) throw std::invalid_argument("bias current must be positive");
    if (!(vt > 0)) throw std::invalid_argument("thermal voltage must be positive");
    return i_abc / (2.0 * vt);
}

struct BiasPoint {
    double i_abc; // A
    double vt;    // V
    double gm;    // S, always i_abc/(2 vt)
};

inline BiasPoint bias_point(double i_abc, double vt = kDefaultVt) {
    return {i_abc, vt, gm_from_bias(i_abc, vt)};
}

struct TunePoint {
    double i_abc; // A
    double w0;    // rad/s
    double q;
};

// Sweep rows ordered by strictly increasing bias current.
struct TuneCurve {
    std::vector<TunePoint> points;
};

// w0 and Q of the multifunction biquad across a log-spaced bias-current
// sweep. base.gm is ignored; each point derives gm from its own current.
inline TuneCurve bias_sweep(const FilterComponents& base, double i_from, double i_to, int n,
                            double vt = kDefaultVt) {
    if (!(i_from > 0) || !(i_to > i_from)) throw std::invalid_argument("degenerate bias range");
    if (n < 2) throw std::invalid_argument("bias sweep needs at least 2 points");

    TuneCurve curve;
    curve.points.reserve(static_cast<std::size_t>(n));
    double ratio = i_to / i_from;
    for (int k = 0; k < n; ++k) {
        double i = i_from * std::pow(ratio, static_cast<double>(k) / (n - 1));
        FilterComponents p = base;
        p.gm = gm_from_bias(i, vt);
        BiquadParams bq = characterize(multifunction_filter(p, InputSelect::low_pass));
        curve.points.push_back({i, bq.w0, bq.q});
    }
    return curve;
}

// Everything design() treats as given; R3 and gm are solved for.
struct DesignFixed {
    double r1;
    double r4;
    double r6;
    double c2;
    double c5;
};

struct DesignResult {
    FilterComponents components;
    BiasPoint bias;
};

// Closed-form inverse of the w0/Q expressions:
//   gm = 1/(w0^2 R1 R4 R6 C2 C5),  R3 = Q/(w0 C2),  I_abc = 2 V_T gm.
inline DesignResult design(double w0, double q, const DesignFixed& fixed,
                           double vt = kDefaultVt) {
    if (!(w0 > 0) || !(q > 0)) throw std::invalid_argument("design targets must be positive");
    if (!(fixed.r1 > 0 && fixed.r4 > 0 && fixed.r6 > 0 && fixed.c2 > 0 && fixed.c5 > 0))
        throw std::invalid_argument("fixed components must all be positive");
    if (!(vt > 0)) throw std::invalid_argument("thermal voltage must be positive");

    double gm = 1.0 / (w0 * w0 * fixed.r1 * fixed.r4 * fixed.r6 * fixed.c2 * fixed.c5);
    double r3 = q / (w0 * fixed.c2);
    FilterComponents p{fixed.r1, r3, fixed.r4, fixed.r6, fixed.c2, fixed.c5, gm};
    return {p, BiasPoint{2.0 * vt * gm, vt, gm}};
}

} // namespace cvl
