// cvlab: frequency-domain analysis of ideal-active-element filters.
// Subcommands: analyze, paper, sweep, sens, tune, design.
// Exit codes: 0 ok, 2 deck parse error, 3 numeric/topology error, 4 usage.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "conveyorlab/conveyorlab.hpp"

namespace {

using nlohmann::json;

struct OutputOptions {
    bool json = false;
    bool quiet = false;
    std::string out_path;
};

void add_output_flags(CLI::App* cmd, OutputOptions& out) {
    cmd->add_flag("--json", out.json, "emit JSON instead of a table");
    cmd->add_flag("--quiet", out.quiet, "suppress the version banner");
    cmd->add_option("--out", out.out_path, "write the report to a file instead of stdout");
}

// Tables carry the version banner (unless --quiet); CSV and JSON streams
// never do, so they stay machine-clean.
void emit(const OutputOptions& out, const std::string& payload, bool table) {
    if (!out.out_path.empty()) {
        std::ofstream f(out.out_path, std::ios::binary);
        if (!f) throw std::invalid_argument("cannot open output file '" + out.out_path + "'");
        f << payload;
        return;
    }
    if (table && !out.quiet) std::cout << "cvlab " << cvl::kVersion << "\n";
    std::cout << payload;
}

// Component override flags shared by the model-based subcommands. Values
// accept engineering suffixes ("28k", "10n").
struct ComponentFlags {
    std::optional<std::string> r1, r3, r4, r6, c2, c5, gm, ibias;
};

void add_component_flags(CLI::App* cmd, ComponentFlags& f, bool with_gm = true) {
    cmd->add_option("--r1", f.r1, "R1 in ohms");
    cmd->add_option("--r3", f.r3, "R3 in ohms");
    cmd->add_option("--r4", f.r4, "R4 in ohms");
    cmd->add_option("--r6", f.r6, "R6 in ohms");
    cmd->add_option("--c2", f.c2, "C2 in farads");
    cmd->add_option("--c5", f.c5, "C5 in farads");
    if (with_gm) {
        cmd->add_option("--gm", f.gm, "OTA transconductance in siemens");
        cmd->add_option("--ibias", f.ibias, "OTA bias current in amperes (sets gm = I/(2*Vt))");
    }
}

double flag_value(const std::string& text, const char* flag) {
    try {
        return cvl::parse_value(text);
    } catch (const cvl::parse_error& e) {
        throw std::invalid_argument(std::string(flag) + ": " + e.what());
    }
}

// Thermal voltage: --temp beats CONVEYOR_LAB_TEMP_K beats the built-in
// 25.85 mV. Temperatures are kelvin; vt = kT/q.
double resolve_vt(const std::optional<double>& temp_flag) {
    if (temp_flag) return cvl::thermal_voltage(*temp_flag);
    if (const char* env = std::getenv("CONVEYOR_LAB_TEMP_K"); env && *env) {
        double t;
        try {
            t = cvl::parse_value(env);
        } catch (const cvl::parse_error& e) {
            throw std::invalid_argument(std::string("CONVEYOR_LAB_TEMP_K: ") + e.what());
        }
        return cvl::thermal_voltage(t);
    }
    return cvl::kDefaultVt;
}

cvl::FilterComponents build_components(const ComponentFlags& f, double vt) {
    cvl::FilterComponents p = cvl::reference_design();
    if (f.r1) p.r1 = flag_value(*f.r1, "--r1");
    if (f.r3) p.r3 = flag_value(*f.r3, "--r3");
    if (f.r4) p.r4 = flag_value(*f.r4, "--r4");
    if (f.r6) p.r6 = flag_value(*f.r6, "--r6");
    if (f.c2) p.c2 = flag_value(*f.c2, "--c2");
    if (f.c5) p.c5 = flag_value(*f.c5, "--c5");
    if (f.gm && f.ibias) throw std::invalid_argument("give --gm or --ibias, not both");
    if (f.gm) p.gm = flag_value(*f.gm, "--gm");
    if (f.ibias) p.gm = cvl::gm_from_bias(flag_value(*f.ibias, "--ibias"), vt);
    cvl::validate(p);
    return p;
}

cvl::InputSelect parse_selection(const std::string& s) {
    if (s == "lp") return cvl::InputSelect::low_pass;
    if (s == "hp") return cvl::InputSelect::high_pass;
    if (s == "bp") return cvl::InputSelect::band_pass;
    if (s == "notch") return cvl::InputSelect::notch;
    throw std::invalid_argument("--filter must be one of lp, hp, bp, notch");
}

cvl::Netlist load_deck(const std::string& path, double vt) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw cvl::parse_error("cannot read deck '" + path + "'");
    std::ostringstream text;
    text << f.rdbuf();
    return cvl::parse_netlist(text.str(), vt);
}

std::string fmt(double v) { return cvl::render_value(v); }

std::string coeff_list(const cvl::Polynomial& p) {
    std::string s;
    for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
        if (i) s += ' ';
        s += fmt(p.coeffs[i]);
    }
    return s.empty() ? "0" : s;
}

// Display form: denominator scaled to leading coefficient 1.
cvl::TransferFunction display_normalized(cvl::TransferFunction tf) {
    double lead = tf.den.leading();
    if (lead == 0.0) return tf;
    for (double& c : tf.num.coeffs) c /= lead;
    for (double& c : tf.den.coeffs) c /= lead;
    return tf;
}

std::optional<cvl::BiquadParams> try_characterize(const cvl::TransferFunction& tf,
                                                  std::string& note) {
    if (tf.den.degree() != 2) return std::nullopt;
    try {
        return cvl::characterize(tf);
    } catch (const cvl::analysis_error& e) {
        note = e.what();
        return std::nullopt;
    }
}

json biquad_json(const cvl::BiquadParams& bq) {
    json j{{"class", cvl::to_string(bq.cls)},
           {"w0_rad_s", bq.w0},
           {"f0_hz", bq.w0 / (2.0 * std::numbers::pi)},
           {"q", bq.q},
           {"bandwidth_rad_s", bq.bandwidth}};
    if (bq.wz) j["wz_rad_s"] = *bq.wz;
    return j;
}

std::string biquad_table(const cvl::BiquadParams& bq) {
    std::ostringstream t;
    t << "class: " << cvl::to_string(bq.cls) << "\n"
      << "w0: " << fmt(bq.w0) << " rad/s (f0: " << fmt(bq.w0 / (2.0 * std::numbers::pi))
      << " Hz)\n"
      << "q: " << fmt(bq.q) << "\n"
      << "bandwidth: " << fmt(bq.bandwidth) << " rad/s\n";
    if (bq.wz)
        t << "wz: " << fmt(*bq.wz) << " rad/s (fz: " << fmt(*bq.wz / (2.0 * std::numbers::pi))
          << " Hz)\n";
    return t.str();
}

json components_json(const cvl::FilterComponents& p) {
    return json{{"r1", p.r1}, {"r3", p.r3}, {"r4", p.r4}, {"r6", p.r6},
                {"c2", p.c2}, {"c5", p.c5}, {"gm", p.gm}};
}

json sensitivity_json(const cvl::FilterComponents& p, double step) {
    cvl::SensitivityReport fd = cvl::sensitivity_report(p, step);
    cvl::SensitivityReport cf = cvl::closed_form_table();
    json rows = json::array();
    for (cvl::Component c : cvl::kAllComponents)
        for (cvl::Metric m : cvl::kAllMetrics)
            rows.push_back(json{{"component", cvl::to_string(c)},
                                {"metric", cvl::to_string(m)},
                                {"fd", fd.at(c, m)},
                                {"closed_form", cf.at(c, m)}});
    return json{{"step", step}, {"rows", rows}};
}

std::string sensitivity_table(const cvl::FilterComponents& p, double step) {
    cvl::SensitivityReport fd = cvl::sensitivity_report(p, step);
    cvl::SensitivityReport cf = cvl::closed_form_table();
    std::ostringstream t;
    t << "sensitivities (finite difference, step " << fmt(step) << "):\n";
    t << "  component  metric  fd            closed_form\n";
    for (cvl::Component c : cvl::kAllComponents)
        for (cvl::Metric m : cvl::kAllMetrics) {
            std::string comp = cvl::to_string(c), met = cvl::to_string(m);
            t << "  " << comp << std::string(11 - comp.size(), ' ') << met
              << std::string(8 - met.size(), ' ') << fmt(fd.at(c, m)) << "  " << fmt(cf.at(c, m))
              << "\n";
        }
    return t.str();
}

std::vector<double> log_spaced(double from, double to, int points) {
    std::vector<double> xs(static_cast<std::size_t>(points));
    double ratio = to / from;
    for (int i = 0; i < points; ++i)
        xs[static_cast<std::size_t>(i)] =
            from * std::pow(ratio, static_cast<double>(i) / (points - 1));
    return xs;
}

int run(int argc, char** argv) {
    CLI::App app{"frequency-domain analysis of ideal-active-element filters"};
    app.require_subcommand(1);

    // analyze ---------------------------------------------------------
    std::string an_deck, an_source;
    OutputOptions an_out;
    std::optional<double> an_temp;
    CLI::App* analyze = app.add_subcommand("analyze", "extract and characterize H(s) of a deck");
    analyze->add_option("deck", an_deck, "netlist file")->required();
    analyze->add_option("--source", an_source, "driving source (default: first in the deck)");
    analyze->add_option("--temp", an_temp, "temperature in kelvin (sets Vt = kT/q)");
    add_output_flags(analyze, an_out);

    // paper -----------------------------------------------------------
    std::string pa_filter;
    ComponentFlags pa_comp;
    OutputOptions pa_out;
    std::optional<double> pa_temp, pa_bp_gain;
    CLI::App* paper =
        app.add_subcommand("paper", "analytic multifunction-biquad model and sensitivities");
    paper->add_option("--filter", pa_filter, "input selection: lp, hp, bp, notch")->required();
    add_component_flags(paper, pa_comp);
    paper->add_option("--bp-gain", pa_bp_gain, "override the band-pass numerator coefficient");
    paper->add_option("--temp", pa_temp, "temperature in kelvin (sets Vt = kT/q)");
    add_output_flags(paper, pa_out);

    // sweep -----------------------------------------------------------
    std::string sw_deck, sw_filter, sw_source;
    ComponentFlags sw_comp;
    OutputOptions sw_out;
    std::optional<double> sw_temp;
    double sw_from = 0, sw_to = 0;
    int sw_points = 0;
    CLI::App* sweep = app.add_subcommand("sweep", "frequency response CSV: freq_hz,mag_db,phase_deg");
    sweep->add_option("deck", sw_deck, "netlist file (or use --filter)");
    sweep->add_option("--filter", sw_filter, "sweep the analytic model: lp, hp, bp, notch");
    sweep->add_option("--source", sw_source, "driving source (deck mode)");
    sweep->add_option("--from", sw_from, "start frequency in Hz")->required();
    sweep->add_option("--to", sw_to, "end frequency in Hz")->required();
    sweep->add_option("--points", sw_points, "number of log-spaced points")->required();
    add_component_flags(sweep, sw_comp);
    sweep->add_option("--temp", sw_temp, "temperature in kelvin (sets Vt = kT/q)");
    add_output_flags(sweep, sw_out);

    // sens ------------------------------------------------------------
    ComponentFlags se_comp;
    OutputOptions se_out;
    std::optional<double> se_temp;
    double se_step = cvl::kDefaultFdStep;
    CLI::App* sens = app.add_subcommand("sens", "sensitivity table of w0 and q");
    add_component_flags(sens, se_comp);
    sens->add_option("--step", se_step, "relative finite-difference step");
    sens->add_option("--temp", se_temp, "temperature in kelvin (sets Vt = kT/q)");
    add_output_flags(sens, se_out);

    // tune ------------------------------------------------------------
    ComponentFlags tu_comp;
    OutputOptions tu_out;
    std::optional<double> tu_temp;
    std::string tu_from, tu_to;
    int tu_points = 0;
    CLI::App* tune = app.add_subcommand("tune", "bias-current sweep CSV: i_abc_a,w0_rad_s,q");
    tune->add_option("--from", tu_from, "start bias current in amperes")->required();
    tune->add_option("--to", tu_to, "end bias current in amperes")->required();
    tune->add_option("--points", tu_points, "number of log-spaced points")->required();
    add_component_flags(tune, tu_comp, /*with_gm=*/false);
    tune->add_option("--temp", tu_temp, "temperature in kelvin (sets Vt = kT/q)");
    add_output_flags(tune, tu_out);

    // design ----------------------------------------------------------
    ComponentFlags de_comp;
    OutputOptions de_out;
    std::optional<double> de_temp;
    std::optional<std::string> de_w0, de_f0, de_q;
    CLI::App* design = app.add_subcommand("design", "solve for gm, R3 and I_abc from w0 and q");
    design->add_option("--w0", de_w0, "target pole frequency in rad/s");
    design->add_option("--f0", de_f0, "target pole frequency in Hz");
    design->add_option("--q", de_q, "target quality factor")->required();
    add_component_flags(design, de_comp, /*with_gm=*/false);
    design->add_option("--temp", de_temp, "temperature in kelvin (sets Vt = kT/q)");
    add_output_flags(design, de_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e); // prints help text or the usage failure
        return code == 0 ? 0 : 4;
    }

    if (analyze->parsed()) {
        cvl::Netlist nl = load_deck(an_deck, resolve_vt(an_temp));
        std::string source = an_source.empty() ? nl.sources.front() : an_source;
        cvl::TransferFunction tf = display_normalized(cvl::extract_tf(nl, source));
        std::string note;
        std::optional<cvl::BiquadParams> bq = try_characterize(tf, note);

        if (an_out.json) {
            json j{{"deck", an_deck},       {"source", tf.source},
                   {"out_node", tf.out_node}, {"num", tf.num.coeffs},
                   {"den", tf.den.coeffs},  {"biquad", bq ? biquad_json(*bq) : json(nullptr)}};
            emit(an_out, j.dump(2) + "\n", false);
        } else {
            std::ostringstream t;
            t << "deck: " << an_deck << "\n"
              << "source: " << tf.source << "  out: " << tf.out_node << "\n"
              << "coefficients ascending in s, denominator leading = 1\n"
              << "num: " << coeff_list(tf.num) << "\n"
              << "den: " << coeff_list(tf.den) << "\n";
            if (bq) t << biquad_table(*bq);
            else if (!note.empty()) t << "biquad: not characterized (" << note << ")\n";
            emit(an_out, t.str(), true);
        }
        return 0;
    }

    if (paper->parsed()) {
        double vt = resolve_vt(pa_temp);
        cvl::FilterComponents p = build_components(pa_comp, vt);
        cvl::InputSelect sel = parse_selection(pa_filter);
        cvl::TransferFunction tf = cvl::multifunction_filter(p, sel, pa_bp_gain);
        cvl::BiquadParams bq = cvl::characterize(tf);
        cvl::TransferFunction disp = display_normalized(tf);

        if (pa_out.json) {
            json j{{"selection", cvl::to_string(sel)},
                   {"components", components_json(p)},
                   {"num", disp.num.coeffs},
                   {"den", disp.den.coeffs},
                   {"biquad", biquad_json(bq)},
                   {"sensitivity", sensitivity_json(p, cvl::kDefaultFdStep)}};
            emit(pa_out, j.dump(2) + "\n", false);
        } else {
            std::ostringstream t;
            t << "selection: " << cvl::to_string(sel) << "\n"
              << "components: r1=" << fmt(p.r1) << " r3=" << fmt(p.r3) << " r4=" << fmt(p.r4)
              << " r6=" << fmt(p.r6) << " c2=" << fmt(p.c2) << " c5=" << fmt(p.c5)
              << " gm=" << fmt(p.gm) << "\n"
              << "coefficients ascending in s, denominator leading = 1\n"
              << "num: " << coeff_list(disp.num) << "\n"
              << "den: " << coeff_list(disp.den) << "\n"
              << biquad_table(bq) << sensitivity_table(p, cvl::kDefaultFdStep);
            emit(pa_out, t.str(), true);
        }
        return 0;
    }

    if (sweep->parsed()) {
        if (sw_deck.empty() == sw_filter.empty())
            throw std::invalid_argument("sweep needs a deck path or --filter, not both");
        if (!(sw_from > 0) || !(sw_to > sw_from))
            throw std::invalid_argument("need 0 < --from < --to");
        if (sw_points < 2) throw std::invalid_argument("--points must be at least 2");

        double vt = resolve_vt(sw_temp);
        cvl::TransferFunction tf;
        if (!sw_deck.empty()) {
            cvl::Netlist nl = load_deck(sw_deck, vt);
            std::string source = sw_source.empty() ? nl.sources.front() : sw_source;
            tf = cvl::extract_tf(nl, source);
        } else {
            tf = cvl::multifunction_filter(build_components(sw_comp, vt),
                                           parse_selection(sw_filter));
        }

        std::ostringstream csv;
        json rows = json::array();
        csv << "freq_hz,mag_db,phase_deg\n";
        for (double f : log_spaced(sw_from, sw_to, sw_points)) {
            cvl::cdouble h = cvl::eval_tf(tf, cvl::cdouble(0.0, 2.0 * std::numbers::pi * f));
            double mag_db = 20.0 * std::log10(std::abs(h));
            double phase_deg = std::arg(h) * 180.0 / std::numbers::pi;
            if (sw_out.json)
                rows.push_back(
                    json{{"freq_hz", f}, {"mag_db", mag_db}, {"phase_deg", phase_deg}});
            else
                csv << fmt(f) << ',' << fmt(mag_db) << ',' << fmt(phase_deg) << "\n";
        }
        if (sw_out.json) emit(sw_out, json{{"rows", rows}}.dump(2) + "\n", false);
        else emit(sw_out, csv.str(), false);
        return 0;
    }

    if (sens->parsed()) {
        cvl::FilterComponents p = build_components(se_comp, resolve_vt(se_temp));
        if (se_out.json) {
            json j{{"components", components_json(p)},
                   {"sensitivity", sensitivity_json(p, se_step)}};
            emit(se_out, j.dump(2) + "\n", false);
        } else {
            emit(se_out, sensitivity_table(p, se_step), true);
        }
        return 0;
    }

    if (tune->parsed()) {
        double vt = resolve_vt(tu_temp);
        cvl::FilterComponents p = build_components(tu_comp, vt);
        cvl::TuneCurve curve = cvl::bias_sweep(p, flag_value(tu_from, "--from"),
                                               flag_value(tu_to, "--to"), tu_points, vt);
        if (tu_out.json) {
            json rows = json::array();
            for (const cvl::TunePoint& pt : curve.points)
                rows.push_back(json{{"i_abc_a", pt.i_abc}, {"w0_rad_s", pt.w0}, {"q", pt.q}});
            emit(tu_out, json{{"rows", rows}}.dump(2) + "\n", false);
        } else {
            std::ostringstream csv;
            csv << "i_abc_a,w0_rad_s,q\n";
            for (const cvl::TunePoint& pt : curve.points)
                csv << fmt(pt.i_abc) << ',' << fmt(pt.w0) << ',' << fmt(pt.q) << "\n";
            emit(tu_out, csv.str(), false);
        }
        return 0;
    }

    if (design->parsed()) {
        if (de_w0.has_value() == de_f0.has_value())
            throw std::invalid_argument("design needs exactly one of --w0 (rad/s) or --f0 (Hz)");
        double vt = resolve_vt(de_temp);
        double w0 = de_w0 ? flag_value(*de_w0, "--w0")
                          : flag_value(*de_f0, "--f0") * 2.0 * std::numbers::pi;
        double q = flag_value(*de_q, "--q");

        cvl::FilterComponents base = build_components(de_comp, vt);
        cvl::DesignFixed fixed{base.r1, base.r4, base.r6, base.c2, base.c5};
        cvl::DesignResult dr = cvl::design(w0, q, fixed, vt);
        cvl::BiquadParams achieved =
            cvl::characterize(cvl::multifunction_filter(dr.components, cvl::InputSelect::low_pass));

        if (de_out.json) {
            json j{{"targets", json{{"w0_rad_s", w0}, {"q", q}}},
                   {"fixed", json{{"r1", fixed.r1}, {"r4", fixed.r4}, {"r6", fixed.r6},
                                  {"c2", fixed.c2}, {"c5", fixed.c5}}},
                   {"components", components_json(dr.components)},
                   {"bias", json{{"i_abc_a", dr.bias.i_abc}, {"vt_v", dr.bias.vt},
                                 {"gm_s", dr.bias.gm}}},
                   {"achieved", json{{"w0_rad_s", achieved.w0},
                                     {"f0_hz", achieved.w0 / (2.0 * std::numbers::pi)},
                                     {"q", achieved.q}}}};
            emit(de_out, j.dump(2) + "\n", false);
        } else {
            std::ostringstream t;
            t << "targets: w0=" << fmt(w0) << " rad/s (f0=" << fmt(w0 / (2.0 * std::numbers::pi))
              << " Hz) q=" << fmt(q) << "\n"
              << "solved: gm=" << fmt(dr.components.gm) << " S  r3=" << fmt(dr.components.r3)
              << " ohm\n"
              << "bias: i_abc=" << fmt(dr.bias.i_abc) << " A at vt=" << fmt(dr.bias.vt) << " V\n"
              << "achieved: w0=" << fmt(achieved.w0) << " rad/s q=" << fmt(achieved.q) << "\n";
            emit(de_out, t.str(), true);
        }
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const cvl::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const cvl::analysis_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
