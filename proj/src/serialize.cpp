// SPDX-License-Identifier: Apache-2.0
#include "layerlab/serialize.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace layerlab {

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string trajectory_csv(const Trajectory& tr)
{
    std::string out = "t,x,u,u_L,u_H,w,v,r\n";
    const int n = tr.horizon();
    for (int t = 0; t <= n; ++t) {
        out += std::to_string(t);
        out += ',';
        out += format_double(tr.x[t]);
        if (t < n) {
            for (double val : {tr.u[t], tr.u_L[t], tr.u_H[t], tr.w[t], tr.v[t], tr.r[t]}) {
                out += ',';
                out += format_double(val);
            }
        } else {
            out += ",,,,,,";
        }
        out += '\n';
    }
    return out;
}

namespace {
Json vec(const Eigen::VectorXd& v)
{
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}
Json complex_json(std::complex<double> z)
{
    return Json{{"re", z.real()}, {"im", z.imag()}};
}
}  // namespace

Json trajectory_json(const Trajectory& tr)
{
    return Json{{"x", vec(tr.x)},     {"u", vec(tr.u)}, {"u_L", vec(tr.u_L)}, {"u_H", vec(tr.u_H)},
                {"w", vec(tr.w)},     {"v", vec(tr.v)}, {"r", vec(tr.r)}};
}

Json to_json(const StabilityReport& r)
{
    return Json{{"eigenvalues", {complex_json(r.eigenvalues[0]), complex_json(r.eigenvalues[1])}},
                {"spectral_radius", r.spectral_radius},
                {"small_gain", r.small_gain},
                {"stable", r.stable},
                {"notes", r.notes}};
}

Json to_json(const OracleResult& r)
{
    Json policy = Json::array();
    for (const PolicyEntry& p : r.policy)
        policy.push_back(Json{{"t", p.t}, {"observations", p.observations}, {"action", p.action}});
    return Json{{"minimax_cost", r.minimax_cost},   {"lattice_step", r.lattice_step},
                {"horizon", r.horizon},             {"nodes_expanded", r.nodes_expanded},
                {"policy_truncated", r.policy_truncated}, {"policy", std::move(policy)}};
}

std::string_view to_string(QuantizerKind k)
{
    switch (k) {
    case QuantizerKind::none: return "none";
    case QuantizerKind::uniform: return "uniform";
    case QuantizerKind::logarithmic: return "logarithmic";
    case QuantizerKind::dynamic_interval: return "dynamic-interval";
    }
    return "?";
}

std::string_view to_string(SweepEval e)
{
    return e == SweepEval::oracle ? "oracle" : "adversarial-sim";
}

namespace {
Json allocation_json(const Allocation& a)
{
    Json j{{"T_L", a.low.T},   {"R_L", a.low.R},   {"T_H", a.high.T}, {"R_H", a.high.R},
           {"evaluated", a.evaluated}};
    j["cost"] = a.evaluated ? Json(a.cost) : Json(nullptr);
    j["low_range"] = a.low_range;
    j["high_range"] = a.high_range;
    j["trail_residual"] = a.trail_residual;
    j["note"] = a.note;
    return j;
}
}  // namespace

Json to_json(const SweepResult& r)
{
    Json rows = Json::array();
    for (const Allocation& a : r.allocations) rows.push_back(allocation_json(a));
    return Json{{"eval", to_string(r.eval)},
                {"allocations", std::move(rows)},
                {"best_diverse", r.best_diverse ? allocation_json(*r.best_diverse) : Json(nullptr)},
                {"best_uniform", r.best_uniform ? allocation_json(*r.best_uniform) : Json(nullptr)},
                {"dess_gain", r.dess_gain ? Json(*r.dess_gain) : Json(nullptr)}};
}

Json to_json(const ArchitectureGraph& g)
{
    static const char* roles[] = {"sensor", "estimator", "controller", "actuator", "plant"};
    Json nodes = Json::array();
    for (const GraphNode& n : g.nodes)
        nodes.push_back(Json{{"id", n.id}, {"role", roles[static_cast<int>(n.role)]}, {"stage", n.stage}});
    Json edges = Json::array();
    for (const GraphEdge& e : g.edges) {
        Json j{{"from", e.from}, {"to", e.to}, {"label", e.label == EdgeLabel::ifp ? "IFP" : "forward"},
               {"delay", e.delay}};
        j["rate"] = e.rate ? Json(*e.rate) : Json("unbounded");
        j["payload"] = e.payload;
        edges.push_back(std::move(j));
    }
    return Json{{"architecture", to_string(g.arch)},
                {"ifp_edge_count", g.ifp_count()},
                {"nodes", std::move(nodes)},
                {"edges", std::move(edges)}};
}

Json to_json(const SeparationReport& r)
{
    return Json{{"joint_cost", r.joint_cost},
                {"low_solo_cost", r.low_solo_cost},
                {"high_solo_cost", r.high_solo_cost},
                {"sum_of_solo_costs", r.sum_of_solo_costs},
                {"separable", r.separable}};
}

std::string oracle_csv(const OracleResult& r)
{
    std::ostringstream os;
    os << "minimax_cost,lattice_step,horizon,nodes_expanded,policy_entries,policy_truncated\n"
       << format_double(r.minimax_cost) << ',' << format_double(r.lattice_step) << ',' << r.horizon << ','
       << r.nodes_expanded << ',' << r.policy.size() << ',' << (r.policy_truncated ? 1 : 0) << '\n';
    return os.str();
}

std::string sweep_csv(const SweepResult& r)
{
    std::string out = "T_L,R_L,T_H,R_H,cost,status,low_range,high_range,trail_residual,note\n";
    for (const Allocation& a : r.allocations) {
        std::string note = a.note;
        for (char& c : note)
            if (c == ',' || c == '\n') c = ';';
        out += std::to_string(a.low.T) + ',' + std::to_string(a.low.R) + ',' + std::to_string(a.high.T) + ',' +
               std::to_string(a.high.R) + ',' + (a.evaluated ? format_double(a.cost) : std::string()) + ',' +
               (a.evaluated ? "evaluated" : "unevaluated") + ',' + format_double(a.low_range) + ',' +
               format_double(a.high_range) + ',' + format_double(a.trail_residual) + ',' + note + '\n';
    }
    return out;
}

}  // namespace layerlab
