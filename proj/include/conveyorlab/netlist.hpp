#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "conveyorlab/error.hpp"
#include "conveyorlab/tuning.hpp"

namespace cvl {

// Node labels are arbitrary identifiers; "0" is ground.
using NodeId = std::string;

struct Resistor {
    std::string name;
    NodeId n_plus, n_minus;
    double ohms;
    bool operator==(const Resistor&) const = default;
};

struct Capacitor {
    std::string name;
    NodeId n_plus, n_minus;
    double farads;
    bool operator==(const Capacitor&) const = default;
};

struct VSource {
    std::string name;
    NodeId n_plus, n_minus;
    double amplitude; // V
    // Inactive sources stamp as 0 V shorts. The deck grammar cannot unset
    // this; analyses pick one active source by name and hold the rest at 0.
    bool active = true;
    bool operator==(const VSource&) const = default;
};

struct Ota {
    std::string name;
    NodeId n_pos, n_neg, n_out;
    double gm; // S, resolved at parse time when given as a bias current
    std::optional<double> i_bias; // A, as written in the deck
    std::optional<double> vt;     // V, as written in the deck
    bool operator==(const Ota&) const = default;
};

// Second-generation current conveyor: V_x = B*V_y, I_y = 0, I_z = K*I_x with
// port currents defined into the device. K is the trailing +/- of the card;
// B stays 1 here but exists so a non-unity constant can be injected.
struct Conveyor {
    std::string name;
    NodeId y, x, z;
    int k;          // +1 or -1
    double b = 1.0;
    bool operator==(const Conveyor&) const = default;
};

using Element = std::variant<Resistor, Capacitor, VSource, Ota, Conveyor>;

inline const std::string& element_name(const Element& e) {
    return std::visit([](const auto& el) -> const std::string& { return el.name; }, e);
}

inline std::vector<NodeId> element_nodes(const Element& e) {
    struct Visitor {
        std::vector<NodeId> operator()(const Resistor& r) { return {r.n_plus, r.n_minus}; }
        std::vector<NodeId> operator()(const Capacitor& c) { return {c.n_plus, c.n_minus}; }
        std::vector<NodeId> operator()(const VSource& v) { return {v.n_plus, v.n_minus}; }
        std::vector<NodeId> operator()(const Ota& o) { return {o.n_pos, o.n_neg, o.n_out}; }
        std::vector<NodeId> operator()(const Conveyor& c) { return {c.y, c.x, c.z}; }
    };
    return std::visit(Visitor{}, e);
}

struct Netlist {
    std::vector<Element> elements;
    std::vector<std::string> sources; // VSource names, deck order
    NodeId out_node;
    std::optional<std::string> title;

    bool operator==(const Netlist&) const = default;

    const VSource* find_source(std::string_view name) const {
        for (const Element& e : elements)
            if (const VSource* v = std::get_if<VSource>(&e); v && v->name == name) return v;
        return nullptr;
    }
};

// "10k" -> 1e4. Engineering suffixes p n u m k Meg G, case-sensitive except
// Meg ("Meg"=1e6, "m"=1e-3, no bare "M"). No suffix means the value as read.
inline double parse_value(std::string_view tok) {
    if (tok.empty()) throw parse_error("empty value token");
    std::string_view body = tok;
    if (body.front() == '+') body.remove_prefix(1); // from_chars rejects a leading +
    double v = 0.0;
    const char* first = body.data();
    const char* last = body.data() + body.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first || !std::isfinite(v))
        throw parse_error("malformed value '" + std::string(tok) + "'");

    std::string_view sfx(ptr, static_cast<std::size_t>(last - ptr));
    double mult = 1.0;
    if (!sfx.empty()) {
        if (sfx == "p") mult = 1e-12;
        else if (sfx == "n") mult = 1e-9;
        else if (sfx == "u") mult = 1e-6;
        else if (sfx == "m") mult = 1e-3;
        else if (sfx == "k") mult = 1e3;
        else if (sfx == "G") mult = 1e9;
        else if (sfx.size() == 3 && (sfx[0] == 'M' || sfx[0] == 'm') &&
                 (sfx[1] == 'E' || sfx[1] == 'e') && (sfx[2] == 'G' || sfx[2] == 'g'))
            mult = 1e6;
        else
            throw parse_error("unknown value suffix '" + std::string(sfx) + "' in '" +
                              std::string(tok) + "'");
    }
    return v * mult;
}

// Shortest decimal that parses back to exactly v. Serialization uses this
// rather than suffixes so round-trips are bit-exact.
inline std::string render_value(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

inline std::string upper(std::string_view s) {
    std::string r(s);
    for (char& c : r) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return r;
}

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

inline double positive_value(const std::string& tok, const std::string& name) {
    double v = parse_value(tok);
    if (!(v > 0)) throw parse_error("non-positive value for " + name);
    return v;
}

} // namespace detail

// Parses the deck grammar:
//   .title <text>
//   R<name> <n+> <n-> <value>
//   C<name> <n+> <n-> <value>
//   V<name> <n+> <n-> AC <amplitude>
//   OTA<name> <n+> <n-> <nout> gm=<v> | ibias=<v> [vt=<v>]
//   CC<name> <y> <x> <z> <+|->
//   .out <node>
// '#' and '*' start full-line comments. Every failure throws parse_error
// with the offending line number; there is no partial result. default_vt is
// the thermal voltage used for ibias= cards that do not carry their own
// vt=; deck-local vt= always wins.
inline Netlist parse_netlist(const std::string& text, double default_vt = kDefaultVt) {
    Netlist nl;
    std::set<std::string> names;
    std::set<NodeId> referenced;
    int out_line = 0;
    int title_line = 0;
    int line_no = 0;

    auto require_fields = [](const std::vector<std::string>& tok, std::size_t n,
                             const char* shape) {
        if (tok.size() != n)
            throw parse_error("wrong field count for '" + tok[0] + "': want " + shape);
    };

    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        auto first = raw.find_first_not_of(" \t");
        if (first == std::string::npos || raw[first] == '#' || raw[first] == '*') continue;

        try {
            std::vector<std::string> tok = detail::split_fields(raw);
            std::string up = detail::upper(tok[0]);

            if (up[0] == '.') {
                if (up == ".TITLE") {
                    if (title_line) throw parse_error("duplicate .title card");
                    title_line = line_no;
                    nl.title = detail::trim(
                        std::string_view(raw).substr(first + tok[0].size()));
                } else if (up == ".OUT") {
                    require_fields(tok, 2, "<node>");
                    if (out_line) throw parse_error("duplicate .out card");
                    out_line = line_no;
                    nl.out_node = tok[1];
                } else {
                    throw parse_error("unknown card '" + tok[0] + "'");
                }
                continue;
            }

            Element el;
            if (up.starts_with("OTA")) {
                if (tok.size() < 5 || tok.size() > 6)
                    throw parse_error("wrong field count for '" + tok[0] +
                                      "': want <n+> <n-> <nout> gm=|ibias= [vt=]");
                Ota o{tok[0], tok[1], tok[2], tok[3], 0.0, {}, {}};
                std::optional<double> gm;
                for (std::size_t i = 4; i < tok.size(); ++i) {
                    auto eq = tok[i].find('=');
                    if (eq == std::string::npos)
                        throw parse_error("expected key=value, got '" + tok[i] + "'");
                    std::string key = detail::upper(tok[i].substr(0, eq));
                    std::string val = tok[i].substr(eq + 1);
                    if (key == "GM") {
                        if (gm) throw parse_error("duplicate gm= on '" + tok[0] + "'");
                        gm = detail::positive_value(val, "gm of " + tok[0]);
                    } else if (key == "IBIAS") {
                        if (o.i_bias) throw parse_error("duplicate ibias= on '" + tok[0] + "'");
                        o.i_bias = detail::positive_value(val, "ibias of " + tok[0]);
                    } else if (key == "VT") {
                        if (o.vt) throw parse_error("duplicate vt= on '" + tok[0] + "'");
                        o.vt = detail::positive_value(val, "vt of " + tok[0]);
                    } else {
                        throw parse_error("unknown OTA parameter '" + tok[i] + "'");
                    }
                }
                if (gm && o.i_bias)
                    throw parse_error("give gm= or ibias= on '" + tok[0] + "', not both");
                if (o.vt && !o.i_bias)
                    throw parse_error("vt= is only meaningful with ibias= on '" + tok[0] + "'");
                if (gm)
                    o.gm = *gm;
                else if (o.i_bias)
                    o.gm = gm_from_bias(*o.i_bias, o.vt ? *o.vt : default_vt);
                else
                    throw parse_error("'" + tok[0] + "' needs gm= or ibias=");
                el = o;
            } else if (up.starts_with("CC")) {
                require_fields(tok, 5, "<y> <x> <z> <+|->");
                int k;
                if (tok[4] == "+") k = 1;
                else if (tok[4] == "-") k = -1;
                else throw parse_error("conveyor polarity must be '+' or '-', got '" +
                                       tok[4] + "'");
                el = Conveyor{tok[0], tok[1], tok[2], tok[3], k};
            } else if (up[0] == 'R') {
                require_fields(tok, 4, "<n+> <n-> <value>");
                el = Resistor{tok[0], tok[1], tok[2], detail::positive_value(tok[3], tok[0])};
            } else if (up[0] == 'C') {
                require_fields(tok, 4, "<n+> <n-> <value>");
                el = Capacitor{tok[0], tok[1], tok[2], detail::positive_value(tok[3], tok[0])};
            } else if (up[0] == 'V') {
                require_fields(tok, 5, "<n+> <n-> AC <amplitude>");
                if (detail::upper(tok[3]) != "AC")
                    throw parse_error("expected AC in source card '" + tok[0] + "'");
                el = VSource{tok[0], tok[1], tok[2], parse_value(tok[4])};
                nl.sources.push_back(tok[0]);
            } else {
                throw parse_error("unknown card '" + tok[0] + "'");
            }

            if (!names.insert(element_name(el)).second)
                throw parse_error("duplicate element name " + element_name(el));
            for (NodeId& n : element_nodes(el)) referenced.insert(std::move(n));
            nl.elements.push_back(std::move(el));
        } catch (const parse_error& e) {
            if (e.line() > 0) throw;
            throw parse_error(e.what(), line_no);
        }
    }

    if (!out_line) throw parse_error("missing .out card", line_no);
    if (nl.sources.empty()) throw parse_error("netlist has no voltage source", line_no);
    if (nl.out_node != "0" && !referenced.count(nl.out_node))
        throw parse_error("output node '" + nl.out_node + "' is not connected to any element",
                          out_line);
    return nl;
}

// Inverse of parse_netlist: parse_netlist(serialize(n)) == n for every valid
// Netlist. OTAs keep the form they were written in (ibias= stays ibias=).
inline std::string serialize(const Netlist& nl) {
    std::ostringstream out;
    if (nl.title) out << ".title " << *nl.title << "\n";
    struct Writer {
        std::ostringstream& out;
        void operator()(const Resistor& r) {
            out << r.name << ' ' << r.n_plus << ' ' << r.n_minus << ' ' << render_value(r.ohms);
        }
        void operator()(const Capacitor& c) {
            out << c.name << ' ' << c.n_plus << ' ' << c.n_minus << ' '
                << render_value(c.farads);
        }
        void operator()(const VSource& v) {
            out << v.name << ' ' << v.n_plus << ' ' << v.n_minus << " AC "
                << render_value(v.amplitude);
        }
        void operator()(const Ota& o) {
            out << o.name << ' ' << o.n_pos << ' ' << o.n_neg << ' ' << o.n_out << ' ';
            if (o.i_bias) {
                out << "ibias=" << render_value(*o.i_bias);
                if (o.vt) out << " vt=" << render_value(*o.vt);
            } else {
                out << "gm=" << render_value(o.gm);
            }
        }
        void operator()(const Conveyor& c) {
            out << c.name << ' ' << c.y << ' ' << c.x << ' ' << c.z << ' '
                << (c.k > 0 ? '+' : '-');
        }
    };
    for (const Element& e : nl.elements) {
        std::visit(Writer{out}, e);
        out << "\n";
    }
    out << ".out " << nl.out_node << "\n";
    return out.str();
}

} // namespace cvl
