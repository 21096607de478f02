#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "conveyorlab/linalg.hpp"
#include "conveyorlab/netlist.hpp"

namespace cvl {

// One assembled MNA system A(s) x = b. Unknowns are the non-ground node
// voltages (deck appearance order) followed by one branch current per
// VSource and per Conveyor X port (deck order). Every matrix entry is affine
// in s: G + s*C for real G, C.
struct LinearSystem {
    CMatrix matrix;
    std::vector<cdouble> rhs;
    std::vector<NodeId> nodes;               // non-ground, appearance order
    std::map<NodeId, int> node_index;        // label -> unknown index
    std::map<std::string, int> branch_index; // element name -> unknown index

    int dimension() const { return static_cast<int>(matrix.size()); }
};

struct AcSolution {
    std::map<NodeId, cdouble> node_voltages;       // includes ground "0" -> 0
    std::map<std::string, cdouble> branch_currents; // V: n+ -> n- through the
                                                    // element; CC: into the X port
    cdouble s;       // rad/s
    double residual; // ||A x - b||_inf
};

// KCL rows sum currents leaving each node. The active source keeps its
// amplitude; every other source is stamped with 0 V (shorted), so the
// dimension never depends on which source drives.
inline LinearSystem assemble(const Netlist& nl, std::string_view active_source, cdouble s) {
    if (!nl.find_source(active_source))
        throw std::invalid_argument("unknown source '" + std::string(active_source) + "'");

    LinearSystem sys;
    for (const Element& e : nl.elements) {
        for (const NodeId& n : element_nodes(e)) {
            if (n == "0" || sys.node_index.count(n)) continue;
            sys.node_index.emplace(n, static_cast<int>(sys.nodes.size()));
            sys.nodes.push_back(n);
        }
    }
    int nn = static_cast<int>(sys.nodes.size());
    int nb = 0;
    for (const Element& e : nl.elements)
        if (std::holds_alternative<VSource>(e) || std::holds_alternative<Conveyor>(e))
            sys.branch_index.emplace(element_name(e), nn + nb++);

    sys.matrix = CMatrix(static_cast<std::size_t>(nn + nb));
    sys.rhs.assign(static_cast<std::size_t>(nn + nb), cdouble(0.0));

    auto col = [&](const NodeId& n) -> int {
        return n == "0" ? -1 : sys.node_index.at(n);
    };
    auto add = [&](int i, int j, cdouble v) {
        if (i >= 0 && j >= 0)
            sys.matrix.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) += v;
    };
    auto stamp_admittance = [&](const NodeId& np, const NodeId& nm, cdouble y) {
        int p = col(np), m = col(nm);
        add(p, p, y);
        add(m, m, y);
        add(p, m, -y);
        add(m, p, -y);
    };

    auto stamp = [&](const auto& el) {
        using T = std::decay_t<decltype(el)>;
        if constexpr (std::is_same_v<T, Resistor>) {
            stamp_admittance(el.n_plus, el.n_minus, 1.0 / el.ohms);
        } else if constexpr (std::is_same_v<T, Capacitor>) {
            stamp_admittance(el.n_plus, el.n_minus, s * el.farads);
        } else if constexpr (std::is_same_v<T, VSource>) {
            int b = sys.branch_index.at(el.name);
            int p = col(el.n_plus), m = col(el.n_minus);
            add(p, b, 1.0); // branch current leaves n+ through the source
            add(m, b, -1.0);
            add(b, p, 1.0); // V(n+) - V(n-) = amplitude (0 when held off)
            add(b, m, -1.0);
            sys.rhs[static_cast<std::size_t>(b)] =
                (el.name == active_source) ? el.amplitude : 0.0;
        } else if constexpr (std::is_same_v<T, Ota>) {
            // current gm (V+ - V-) injected into n_out
            int out = col(el.n_out);
            add(out, col(el.n_pos), -el.gm);
            add(out, col(el.n_neg), el.gm);
        } else { // Conveyor
            int b = sys.branch_index.at(el.name);
            add(col(el.x), b, 1.0);                      // i_x into the device
            add(col(el.z), b, static_cast<double>(el.k)); // i_z = K i_x, into the device
            add(b, col(el.x), 1.0);                      // V_x - B V_y = 0
            add(b, col(el.y), -el.b);
            // I_y = 0: the Y row gets nothing
        }
    };
    for (const Element& e : nl.elements) std::visit(stamp, e);
    return sys;
}

inline AcSolution solve_ac(const Netlist& nl, std::string_view active_source, cdouble s) {
    LinearSystem sys = assemble(nl, active_source, s);
    std::vector<cdouble> x = lu_solve(sys.matrix, sys.rhs);

    std::vector<cdouble> r = mat_vec(sys.matrix, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= sys.rhs[i];

    AcSolution sol;
    sol.s = s;
    sol.residual = inf_norm(r);
    sol.node_voltages["0"] = 0.0;
    for (const auto& [n, i] : sys.node_index)
        sol.node_voltages[n] = x[static_cast<std::size_t>(i)];
    for (const auto& [name, i] : sys.branch_index)
        sol.branch_currents[name] = x[static_cast<std::size_t>(i)];
    return sol;
}

// V(out_node) / amplitude of the active source.
inline cdouble transfer_at(const Netlist& nl, std::string_view active_source, cdouble s) {
    const VSource* src = nl.find_source(active_source);
    if (!src)
        throw std::invalid_argument("unknown source '" + std::string(active_source) + "'");
    if (src->amplitude == 0.0)
        throw analysis_error("active source '" + src->name + "' has zero amplitude");
    AcSolution sol = solve_ac(nl, active_source, s);
    if (nl.out_node == "0") return 0.0;
    auto it = sol.node_voltages.find(nl.out_node);
    if (it == sol.node_voltages.end())
        throw analysis_error("output node '" + nl.out_node + "' is not part of the system");
    return it->second / src->amplitude;
}

} // namespace cvl
