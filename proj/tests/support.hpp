// Shared test fixtures: seeded random draws, deck builders with known closed
// forms, and a random netlist generator for parser round-trips. Kept free of
// any test-framework includes so the acceptance runner can use it too.
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "conveyorlab/conveyorlab.hpp"

namespace support {

inline double log_uniform(std::mt19937& g, double lo, double hi) {
    std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
    return std::exp(d(g));
}

// Component ranges for randomized model checks: R in [1e2, 1e6] ohm,
// C in [1e-11, 1e-6] F, gm in [1e-5, 1e-1] S.
inline cvl::FilterComponents random_components(std::mt19937& g) {
    auto r = [&] { return log_uniform(g, 1e2, 1e6); };
    auto c = [&] { return log_uniform(g, 1e-11, 1e-6); };
    return {r(), r(), r(), r(), c(), c(), log_uniform(g, 1e-5, 1e-1)};
}

// 20 log-spaced jw points spanning [lo, hi] rad/s.
inline std::vector<cvl::cdouble> log_jw(double lo, double hi, int n = 20) {
    std::vector<cvl::cdouble> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double w = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
        pts.emplace_back(0.0, w);
    }
    return pts;
}

// ---- decks with hand-derived closed forms -------------------------------

// H(s) = 1/(1 + s R C)
inline std::string rc_lowpass_deck(double r = 1.0, double c = 1.0) {
    return "V1 in 0 AC 1\nR1 in out " + cvl::render_value(r) + "\nC1 out 0 " +
           cvl::render_value(c) + "\n.out out\n";
}

// H = Rb/(Ra+Rb) at every frequency; equal resistors give 0.5
inline std::string divider_deck(double ra = 1e3, double rb = 1e3) {
    return "V1 in 0 AC 1\nR1 in out " + cvl::render_value(ra) + "\nR2 out 0 " +
           cvl::render_value(rb) + "\n.out out\n";
}

// OTA integrator: H(s) = gm/(s C)
inline std::string integrator_deck(double gm = 1e-3, double c = 1e-6) {
    return "V1 in 0 AC 1\nOTA1 in 0 out gm=" + cvl::render_value(gm) + "\nC1 out 0 " +
           cvl::render_value(c) + "\n.out out\n";
}

// Conveyor with grounded Y: X is a virtual ground, H = -K R2/R1.
// 3 non-ground nodes + 1 source + 1 conveyor = dimension 5.
inline std::string ccii_amp_deck(char polarity = '+', double r1 = 1e3, double r2 = 2e3) {
    return "V1 in 0 AC 1\nR1 in x " + cvl::render_value(r1) + "\nCC1 0 x z " + polarity +
           std::string("\nR2 z 0 ") + cvl::render_value(r2) + "\n.out z\n";
}

// Two equal RC sections: H(s) = 1/(s^2 R^2 C^2 + 3 s R C + 1)
inline std::string ladder_deck(double r = 1.0, double c = 1.0) {
    return "V1 in 0 AC 1\nR1 in mid " + cvl::render_value(r) + "\nC1 mid 0 " +
           cvl::render_value(c) + "\nR2 mid out " + cvl::render_value(r) + "\nC2 out 0 " +
           cvl::render_value(c) + "\n.out out\n";
}

// Two-source resistive summer, all R equal: V_out = (V1 + V2)/3.
inline std::string summer_deck(double amp1 = 1.0, double amp2 = 1.0) {
    return "V1 a 0 AC " + cvl::render_value(amp1) + "\nV2 b 0 AC " + cvl::render_value(amp2) +
           "\nR1 a out 1k\nR2 b out 1k\nR3 out 0 1k\n.out out\n";
}

// Conveyor feeding a grounded capacitor, buffered by an OTA into a load:
// X carries i_x = Vin/R1, Z integrates it, the OTA scales by gm R2:
//   H(s) = -K gm R2 / (s R1 C2)
inline std::string mixed_deck(char polarity = '+', double r1 = 1e3, double c2 = 1e-7,
                              double gm = 1e-3, double r2 = 2e3) {
    return "V1 in 0 AC 1\nR1 in x " + cvl::render_value(r1) + "\nCC1 0 x z " + polarity +
           std::string("\nC2 z 0 ") + cvl::render_value(c2) + "\nOTA1 z 0 out gm=" +
           cvl::render_value(gm) + "\nR2 out 0 " + cvl::render_value(r2) + "\n.out out\n";
}

// All oracle deck texts, for sweep-style properties.
inline std::vector<std::string> oracle_decks() {
    return {rc_lowpass_deck(1e3, 1e-7), divider_deck(), integrator_deck(),
            ccii_amp_deck('+'),        ccii_amp_deck('-'), ladder_deck(),
            summer_deck(),             mixed_deck('+'),    mixed_deck('-')};
}

// Random structurally-valid netlist for parser round-trips. Names follow the
// card prefixes (a capacitor is never named CC...), the first element is
// always a source on a non-ground node, and OTA bias forms are resolved the
// same way the parser does.
inline cvl::Netlist random_netlist(std::mt19937& g) {
    const char* pool[] = {"0", "a", "b", "c", "d"};
    std::uniform_int_distribution<int> node_pick(0, 4), extra(1, 6), pct(0, 99);
    auto node = [&] { return std::string(pool[node_pick(g)]); };

    cvl::Netlist nl;
    int nr = 0, nc = 0, nv = 0, no = 0, ncc = 0;

    cvl::VSource v0{"V" + std::to_string(++nv), std::string(pool[1 + node_pick(g) % 4]),
                    node(), 0.0};
    std::uniform_real_distribution<double> amp(-5.0, 5.0);
    v0.amplitude = amp(g);
    if (v0.amplitude == 0.0) v0.amplitude = 1.0;
    nl.sources.push_back(v0.name);
    nl.out_node = v0.n_plus;
    nl.elements.emplace_back(v0);

    int n = extra(g);
    for (int i = 0; i < n; ++i) {
        switch (pct(g) % 5) {
        case 0:
            nl.elements.emplace_back(
                cvl::Resistor{"R" + std::to_string(++nr), node(), node(),
                              log_uniform(g, 1.0, 1e6)});
            break;
        case 1:
            nl.elements.emplace_back(
                cvl::Capacitor{"C" + std::to_string(++nc), node(), node(),
                               log_uniform(g, 1e-12, 1e-5)});
            break;
        case 2: {
            cvl::VSource v{"V" + std::to_string(++nv), node(), node(), amp(g)};
            if (v.amplitude == 0.0) v.amplitude = 1.0;
            nl.sources.push_back(v.name);
            nl.elements.emplace_back(v);
            break;
        }
        case 3: {
            cvl::Ota o{"OTA" + std::to_string(++no), node(), node(), node(), 0.0, {}, {}};
            if (pct(g) < 50) {
                o.gm = log_uniform(g, 1e-5, 1e-1);
            } else {
                o.i_bias = log_uniform(g, 1e-6, 1e-2);
                if (pct(g) < 50) o.vt = log_uniform(g, 0.01, 0.04);
                o.gm = cvl::gm_from_bias(*o.i_bias, o.vt ? *o.vt : cvl::kDefaultVt);
            }
            nl.elements.emplace_back(o);
            break;
        }
        default:
            nl.elements.emplace_back(cvl::Conveyor{"CC" + std::to_string(++ncc), node(),
                                                   node(), node(), pct(g) < 50 ? 1 : -1});
            break;
        }
    }
    if (pct(g) < 30) nl.title = "random deck " + std::to_string(pct(g));
    return nl;
}

// R -> kR, C -> C/k, gm -> gm/k: every voltage transfer is invariant.
inline cvl::Netlist scale_impedance(cvl::Netlist nl, double k) {
    for (cvl::Element& e : nl.elements) {
        if (auto* r = std::get_if<cvl::Resistor>(&e)) r->ohms *= k;
        else if (auto* c = std::get_if<cvl::Capacitor>(&e)) c->farads /= k;
        else if (auto* o = std::get_if<cvl::Ota>(&e)) {
            o->gm /= k;
            o->i_bias.reset();
            o->vt.reset();
        }
    }
    return nl;
}

} // namespace support
