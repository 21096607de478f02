#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <utility>

#include "conveyorlab/biquad.hpp"

namespace cvl {

enum class Component { r1, r3, r4, r6, c2, c5, gm };
enum class Metric { w0, q };

inline constexpr std::array<Component, 7> kAllComponents = {
    Component::r1, Component::r3, Component::r4, Component::r6,
    Component::c2, Component::c5, Component::gm};
inline constexpr std::array<Metric, 2> kAllMetrics = {Metric::w0, Metric::q};

inline const char* to_string(Component c) {
    switch (c) {
    case Component::r1: return "r1";
    case Component::r3: return "r3";
    case Component::r4: return "r4";
    case Component::r6: return "r6";
    case Component::c2: return "c2";
    case Component::c5: return "c5";
    case Component::gm: return "gm";
    }
    return "?";
}

inline const char* to_string(Metric m) { return m == Metric::w0 ? "w0" : "q"; }

inline double& component_ref(FilterComponents& p, Component c) {
    switch (c) {
    case Component::r1: return p.r1;
    case Component::r3: return p.r3;
    case Component::r4: return p.r4;
    case Component::r6: return p.r6;
    case Component::c2: return p.c2;
    case Component::c5: return p.c5;
    case Component::gm: return p.gm;
    }
    throw std::invalid_argument("unknown component");
}

// step is the relative finite-difference step, 0 when the values are exact
// closed forms.
struct SensitivityReport {
    double step = 0.0;
    std::map<std::pair<Component, Metric>, double> entries;

    double at(Component c, Metric m) const { return entries.at({c, m}); }
};

inline double metric_of(const FilterComponents& p, Metric m) {
    BiquadParams bq = characterize(multifunction_filter(p, InputSelect::low_pass));
    return m == Metric::w0 ? bq.w0 : bq.q;
}

inline constexpr double kDefaultFdStep = 1e-5;

// Normalized sensitivity S_x^F = (x/F)(dF/dx), evaluated as the central
// difference (F(x(1+h)) - F(x(1-h))) / (2 h F(x)). The metric runs through
// the full filter-model + characterize pipeline.
inline double sensitivity_fd(const FilterComponents& p, Component c, Metric m,
                             double h = kDefaultFdStep) {
    if (!(h >= 1e-7 && h <= 1e-2))
        throw std::invalid_argument("fd step must lie in [1e-7, 1e-2]");
    validate(p);
    double f0 = metric_of(p, m);
    FilterComponents hi = p, lo = p;
    component_ref(hi, c) *= 1.0 + h;
    component_ref(lo, c) *= 1.0 - h;
    return (metric_of(hi, m) - metric_of(lo, m)) / (2.0 * h * f0);
}

inline SensitivityReport sensitivity_report(const FilterComponents& p,
                                            double h = kDefaultFdStep) {
    SensitivityReport r;
    r.step = h;
    for (Component c : kAllComponents)
        for (Metric m : kAllMetrics) r.entries[{c, m}] = sensitivity_fd(p, c, m, h);
    return r;
}

// Exact values: every component moves w0 with sensitivity -1/2 except r3,
// which does not appear in w0 at all. For q: r3 is +1 (the only unit-size
// entry), c2 is +1/2, the rest are -1/2.
inline SensitivityReport closed_form_table() {
    SensitivityReport r;
    r.step = 0.0;
    for (Component c : kAllComponents) {
        r.entries[{c, Metric::w0}] = c == Component::r3 ? 0.0 : -0.5;
        double q = -0.5;
        if (c == Component::r3) q = 1.0;
        if (c == Component::c2) q = 0.5;
        r.entries[{c, Metric::q}] = q;
    }
    return r;
}

} // namespace cvl
