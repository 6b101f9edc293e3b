#include "gasmix/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

#include "gasmix/errors.hpp"
#include "gasmix/pipeflow.hpp"

namespace gasmix {

namespace {

std::vector<double> effective_loads(const Network& net, std::span<const double> loads) {
    if (loads.empty()) {
        std::vector<double> out(net.nodes().size());
        for (size_t i = 0; i < out.size(); ++i) out[i] = net.node(static_cast<int>(i)).load;
        return out;
    }
    if (loads.size() != net.nodes().size())
        throw std::invalid_argument("load override size does not match node count");
    return {loads.begin(), loads.end()};
}

double load_scale(const std::vector<double>& b) {
    double s = 0.0;
    for (double v : b) s += std::abs(v);
    return std::max(1.0, s);
}

[[noreturn]] void rethrow_with_edge(const Error& err, const std::string& edge_id) {
    const std::string msg = std::string(err.what()) + " [edge '" + edge_id + "']";
    if (dynamic_cast<const NoBracket*>(&err)) throw NoBracket(msg);
    if (dynamic_cast<const SubsonicViolation*>(&err)) throw SubsonicViolation(msg);
    if (dynamic_cast<const NonPositiveZ*>(&err)) throw NonPositiveZ(msg);
    if (dynamic_cast<const CompressorBackflow*>(&err)) throw CompressorBackflow(msg);
    throw Error(msg);
}

} // namespace

std::vector<double> solve_tree_flows(const Network& net, std::span<const double> loads) {
    if (net.cyclomatic_number() != 0 || !net.connected())
        throw std::invalid_argument("tree flow solver requires a connected tree");
    std::vector<double> b = effective_loads(net, loads);
    double sum = 0.0;
    for (double v : b) sum += v;
    if (std::abs(sum) > 1e-9 * load_scale(b))
        throw Unbalanced("node loads sum to " + std::to_string(sum));

    const int n = static_cast<int>(net.nodes().size());
    const int m = static_cast<int>(net.edges().size());
    std::vector<double> q(m, 0.0);
    std::vector<double> bw = b;
    std::vector<int> degree(n, 0);
    std::vector<char> active(m, 1);
    for (int v = 0; v < n; ++v) degree[v] = static_cast<int>(net.incident_edges(v).size());

    std::deque<int> leaves;
    for (int v = 0; v < n; ++v)
        if (degree[v] == 1) leaves.push_back(v);

    int processed = 0;
    while (!leaves.empty()) {
        const int v = leaves.front();
        leaves.pop_front();
        if (degree[v] != 1) continue;
        int e = -1;
        for (int cand : net.incident_edges(v))
            if (active[cand]) { e = cand; break; }
        if (e < 0) continue;
        const int a = net.incidence(v, e);
        q[e] = a * bw[v]; // a(v,e) q_e = bw_v with a in {-1, +1}
        const int w = net.other_end(e, v);
        bw[w] -= net.incidence(w, e) * q[e];
        bw[v] = 0.0;
        active[e] = 0;
        --degree[v];
        --degree[w];
        ++processed;
        if (degree[w] == 1) leaves.push_back(w);
    }
    if (processed != m)
        throw std::invalid_argument("leaf elimination failed; network is not a tree");

    double res = 0.0;
    for (int v = 0; v < n; ++v) {
        double lhs = -b[v];
        for (int e : net.incident_edges(v)) lhs += net.incidence(v, e) * q[e];
        res = std::max(res, std::abs(lhs));
    }
    double bmax = 1.0;
    for (double v : b) bmax = std::max(bmax, std::abs(v));
    if (res > 1e-12 * bmax)
        throw Error("tree flow residual " + std::to_string(res) + " exceeds tolerance");
    return q;
}

CompositionField propagate_composition(const Network& net, const std::vector<double>& q,
                                       std::span<const double> loads,
                                       const std::map<int, double>& zeta_override) {
    const int n = static_cast<int>(net.nodes().size());
    const int m = static_cast<int>(net.edges().size());
    std::vector<double> b = effective_loads(net, loads);
    CompositionField field;
    field.node_eta.assign(n, 0.0);
    field.edge_eta.assign(m, 0.0);

    // orient every edge by the flow direction; q == 0 keeps the edge's own
    // orientation (paper convention for the boundary case)
    std::vector<int> tail(m), head(m), indeg(n, 0);
    for (int e = 0; e < m; ++e) {
        tail[e] = q[e] >= 0.0 ? net.from_index(e) : net.to_index(e);
        head[e] = net.other_end(e, tail[e]);
        ++indeg[head[e]];
    }

    auto supply_zeta = [&](int v) -> std::optional<double> {
        auto it = zeta_override.find(v);
        if (it != zeta_override.end()) return it->second;
        return net.node(v).zeta;
    };

    std::deque<int> ready;
    for (int v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push_back(v);

    int done = 0;
    while (!ready.empty()) {
        const int v = ready.front();
        ready.pop_front();
        double num = 0.0, den = 0.0;
        for (int e : net.incident_edges(v)) {
            if (head[e] != v) continue;
            const double w = std::abs(q[e]);
            num += field.edge_eta[e] * w;
            den += w;
        }
        if (b[v] < 0.0) {
            const auto zeta = supply_zeta(v);
            if (!zeta)
                throw ValidationError("supply node '" + net.node(v).id + "' is missing zeta");
            num += *zeta * (-b[v]);
            den += -b[v];
        }
        double eta;
        if (den > 0.0) {
            eta = num / den;
        } else if (auto zeta = supply_zeta(v)) {
            eta = *zeta; // idle supply keeps its boundary composition
        } else {
            double esum = 0.0;
            int ecount = 0;
            for (int e : net.incident_edges(v)) {
                if (head[e] == v) {
                    esum += field.edge_eta[e];
                    ++ecount;
                }
            }
            if (ecount > 0) {
                eta = esum / ecount;
            } else {
                for (int e : net.incident_edges(v))
                    if (tail[e] == v && std::abs(q[e]) > 0.0)
                        throw ZeroThroughput("node '" + net.node(v).id +
                                             "' has zero inflow but carries outgoing flow");
                eta = 0.0;
            }
        }
        field.node_eta[v] = eta;
        ++done;
        for (int e : net.incident_edges(v)) {
            if (tail[e] != v) continue;
            field.edge_eta[e] = eta;
            if (--indeg[head[e]] == 0) ready.push_back(head[e]);
        }
    }
    if (done != n)
        throw std::invalid_argument("composition propagation requires an acyclic flow digraph");
    return field;
}

std::vector<double> propagate_pressure(const Network& net, const std::vector<double>& q,
                                       const std::vector<double>& edge_eta,
                                       const CompressibilityModel& model, MomentumMode mode,
                                       int ref_node, double ref_pressure) {
    if (!(ref_pressure > 0.0)) throw std::invalid_argument("reference pressure must be positive");
    const int n = static_cast<int>(net.nodes().size());
    std::vector<double> p(n, -1.0);
    p[ref_node] = ref_pressure;
    std::deque<int> queue{ref_node};
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int e : net.incident_edges(v)) {
            const int w = net.other_end(e, v);
            if (p[w] > 0.0) continue;
            const Edge& ed = net.edge(e);
            try {
                if (ed.kind == EdgeKind::compressor) {
                    if (q[e] < -1e-12)
                        throw CompressorBackflow("negative flow " + std::to_string(q[e]) +
                                                 " through compressor");
                    p[w] = net.from_index(e) == v ? compressor_out(ed.gamma, p[v])
                                                  : p[v] / ed.gamma;
                } else {
                    const EdgeState state{q[e], MassFraction(edge_eta[e])};
                    p[w] = net.from_index(e) == v
                               ? downstream_pressure(model, ed.pipe, state, p[v], mode)
                               : upstream_pressure(model, ed.pipe, state, p[v], mode);
                }
            } catch (const Error& err) {
                rethrow_with_edge(err, ed.id);
            }
            queue.push_back(w);
        }
    }
    for (int v = 0; v < n; ++v)
        if (!(p[v] > 0.0))
            throw std::invalid_argument("pressure propagation did not reach node '" +
                                        net.node(v).id + "'");
    return p;
}

std::vector<double> modified_loads(const Network& net, const CycleInfo& cycle,
                                   const std::vector<double>& q, std::span<const double> loads) {
    std::vector<double> b = effective_loads(net, loads);
    std::set<int> on_cycle(cycle.edges.begin(), cycle.edges.end());
    std::vector<double> out;
    out.reserve(cycle.nodes.size());
    for (int v : cycle.nodes) {
        double corrected = b[v];
        for (int e : net.incident_edges(v))
            if (!on_cycle.count(e)) corrected -= net.incidence(v, e) * q[e];
        out.push_back(corrected);
    }
    double sum = 0.0, scale = 0.0;
    for (double v : out) {
        sum += v;
        scale += std::abs(v);
    }
    if (std::abs(sum) > 1e-9 * std::max(1.0, scale))
        throw Error("modified loads sum to " + std::to_string(sum) + ", expected 0");
    return out;
}

int wrapped_partial_sums_start(std::span<const double> y) {
    const int n = static_cast<int>(y.size());
    if (n == 0) throw std::invalid_argument("empty sequence");
    double sum = 0.0, scale = 0.0;
    for (double v : y) {
        sum += v;
        scale += std::abs(v);
    }
    if (std::abs(sum) > 1e-9 * std::max(1.0, scale))
        throw NotZeroSum("sequence sums to " + std::to_string(sum));

    double prefix = 0.0, min_prefix = 0.0;
    int m = 0; // 1-based largest index attaining the minimum
    for (int i = 1; i <= n; ++i) {
        prefix += y[i - 1];
        if (m == 0 || prefix <= min_prefix) {
            min_prefix = prefix;
            m = i;
        }
    }
    return (m % n) + 1;
}

CutChoice select_cut_edge(const Network& net, const CycleInfo& cycle,
                          const std::vector<double>& modified) {
    const int n = static_cast<int>(cycle.nodes.size());
    const int k = wrapped_partial_sums_start(modified);
    const int k0 = k - 1;                 // 0-based position of v_{k*}
    const int cut_pos = (k0 + n - 1) % n; // edge between v_{k*-1} and v_{k*}
    const int eidx = cycle.edges[cut_pos];
    const Edge& e = net.edge(eidx);
    if (e.kind == EdgeKind::compressor)
        throw CutThroughCompressor("cut selection landed on compressor '" + e.id + "'");
    const bool oriented_forward =
        net.from_index(eidx) == cycle.nodes[cut_pos] && net.to_index(eidx) == cycle.nodes[k0];
    return CutChoice{e.id, !oriented_forward, k0};
}

namespace {

/// Extend a load vector indexed like the pre-cut network onto a cut network
/// (which keeps the node order and appends v_l, v_r).
std::vector<double> extend_loads_to(const Network& target, const std::vector<double>& base) {
    std::vector<double> out(target.nodes().size(), 0.0);
    for (int v = 0; v < static_cast<int>(target.nodes().size()); ++v)
        out[v] = target.node(v).load;
    for (size_t i = 0; i < base.size(); ++i) out[i] = base[i];
    return out;
}

} // namespace

BetaResult beta_values(const Network& net, const CycleInfo& cycle,
                       const std::vector<double>& modified, const CutChoice& choice) {
    const int n = static_cast<int>(cycle.nodes.size());
    BetaResult out;
    double running = 0.0;
    for (int i = 1; i <= n - 1; ++i) {
        running += modified[(choice.start_position + i - 1) % n];
        const int eidx = cycle.edges[(choice.start_position + i - 1) % n];
        out.beta.emplace_back(net.edge(eidx).id, running);
        out.lambda_hi = std::max(out.lambda_hi, running);
        out.lambda_lo = std::min(out.lambda_lo, running);
    }
    return out;
}

MassFraction mu_eta(const CutResult& cut, double lambda, std::span<const double> base_loads) {
    std::vector<double> loads =
        base_loads.empty()
            ? extend_loads_to(cut.net, {})
            : extend_loads_to(cut.net, std::vector<double>(base_loads.begin(), base_loads.end()));
    const int vl = cut.net.node_index(cut.vl_id);
    const int vr = cut.net.node_index(cut.vr_id);
    loads[vl] = lambda;
    loads[vr] = -lambda;
    const std::vector<double> q = solve_tree_flows(cut.net, loads);
    const CompositionField comp = propagate_composition(cut.net, q, loads, {{vr, 0.5}});
    return MassFraction(comp.node_eta[vl]);
}

namespace {

struct CycleEvaluation {
    double g = 0.0;
    double mu = 0.0;
    std::vector<double> q;
    CompositionField comp;
    std::vector<double> p;
};

/// One-cycle instance prepared for repeated evaluations of g(lambda).
class CycleSolver {
public:
    CycleSolver(const Network& net, const CompressibilityModel& model, MomentumMode mode,
                int ref_node, double ref_pressure, std::span<const double> loads)
        : model_(model), mode_(mode) {
        const auto cycle_opt = find_cycle(net);
        if (!cycle_opt) throw std::invalid_argument("cycle solver requires a one-cycle network");
        cycle_ = *cycle_opt;
        base_loads_ = effective_loads(net, loads);

        // lambda-independent flows of the branches hanging off the cycle
        CutResult probe = cut_network(net, net.edge(cycle_.edges.front()).id);
        std::vector<double> probe_loads = extend_loads_to(probe.net, base_loads_);
        const std::vector<double> q_probe = solve_tree_flows(probe.net, probe_loads);
        std::vector<double> q_orig(net.edges().size(), 0.0);
        for (int e = 0; e < static_cast<int>(net.edges().size()); ++e) {
            const std::string& id = net.edge(e).id;
            if (id != probe.cut_edge.id) q_orig[e] = q_probe[probe.net.edge_index(id)];
        }
        modified_ = modified_loads(net, cycle_, q_orig, base_loads_);

        choice_ = select_cut_edge(net, cycle_, modified_);
        work_ = choice_.flip_needed ? flip_edge(net, choice_.edge_id) : net;
        cut_ = cut_network(work_, choice_.edge_id);

        const BetaResult betas = beta_values(net, cycle_, modified_, choice_);
        beta_ = betas.beta;
        lambda_hi_ = betas.lambda_hi;
        lambda_lo_ = betas.lambda_lo;
        double scale = 0.0;
        for (double v : modified_) scale += std::abs(v);
        if (lambda_lo_ < -1e-9 * std::max(1.0, scale))
            throw Error("cut selection produced a negative beta value " +
                        std::to_string(lambda_lo_));
        lambda_lo_ = std::min(lambda_lo_, 0.0);

        vl_ = cut_.net.node_index(cut_.vl_id);
        vr_ = cut_.net.node_index(cut_.vr_id);
        foot_ = cut_.net.node_index(cut_.cut_edge.from);
        head_ = cut_.net.node_index(cut_.cut_edge.to);
        el_ = cut_.net.edge_index(cut_.el_id);
        ref_cut_ = cut_.net.node_index(net.node(ref_node).id);
        ref_pressure_ = ref_pressure;
        cut_loads_ = extend_loads_to(cut_.net, base_loads_);
    }

    CycleEvaluation evaluate(double lambda) const {
        std::vector<double> loads = cut_loads_;
        loads[vl_] = lambda;
        loads[vr_] = -lambda;
        CycleEvaluation ev;
        ev.q = solve_tree_flows(cut_.net, loads);
        // the composition arriving at v_l does not depend on the composition
        // injected at v_r for lambda in I_sol, so mu can be read off directly
        const CompositionField first =
            propagate_composition(cut_.net, ev.q, loads, {{vr_, 0.5}});
        ev.mu = first.node_eta[vl_];
        ev.comp = propagate_composition(cut_.net, ev.q, loads, {{vr_, ev.mu}});
        ev.p = propagate_pressure(cut_.net, ev.q, ev.comp.edge_eta, model_, mode_, ref_cut_,
                                  ref_pressure_);
        double p_vl = ev.p[foot_];
        if (cut_.cut_edge.kind == EdgeKind::pipe) {
            const EdgeState state{lambda, MassFraction(ev.comp.edge_eta[el_])};
            try {
                p_vl = downstream_pressure(model_, cut_.cut_edge.pipe, state, ev.p[foot_], mode_);
            } catch (const Error& err) {
                rethrow_with_edge(err, cut_.cut_edge.id);
            }
        }
        ev.g = ev.p[head_] - p_vl;
        return ev;
    }

    const CycleInfo& cycle() const { return cycle_; }
    const CutChoice& choice() const { return choice_; }
    const CutResult& cut() const { return cut_; }
    const Network& work_net() const { return work_; }
    double lambda_hi() const { return lambda_hi_; }
    double lambda_lo() const { return lambda_lo_; }
    const std::vector<std::pair<std::string, double>>& beta() const { return beta_; }
    int vl() const { return vl_; }
    int vr() const { return vr_; }

private:
    const CompressibilityModel& model_;
    MomentumMode mode_;
    CycleInfo cycle_;
    std::vector<double> base_loads_;
    std::vector<double> modified_;
    CutChoice choice_;
    Network work_{{}, {}};
    CutResult cut_{Network({}, {}), Edge{}, "", "", "", ""};
    std::vector<std::pair<std::string, double>> beta_;
    double lambda_lo_ = 0.0, lambda_hi_ = 0.0;
    int vl_ = -1, vr_ = -1, foot_ = -1, head_ = -1, el_ = -1, ref_cut_ = -1;
    double ref_pressure_ = 0.0;
    std::vector<double> cut_loads_;
};

int single_reference_node(const Network& net) {
    int ref = -1;
    for (int v = 0; v < static_cast<int>(net.nodes().size()); ++v) {
        if (net.node(v).pressure) {
            if (ref >= 0)
                throw ValidationError("several pressure references; use the mixed-BC solver");
            ref = v;
        }
    }
    if (ref < 0) throw ValidationError("no pressure reference node");
    return ref;
}

SteadyState assemble_state(const Network& net, const std::vector<double>& loads,
                           const std::vector<double>& q, const CompositionField& comp,
                           const std::vector<double>& p) {
    SteadyState st;
    for (int v = 0; v < static_cast<int>(net.nodes().size()); ++v) {
        const std::string& id = net.node(v).id;
        st.node_pressure[id] = p[v];
        st.node_eta[id] = comp.node_eta[v];
        st.node_load[id] = loads[v];
    }
    for (int e = 0; e < static_cast<int>(net.edges().size()); ++e) {
        const std::string& id = net.edge(e).id;
        st.edge_flow[id] = q[e];
        st.edge_eta[id] = comp.edge_eta[e];
    }
    return st;
}

SteadyState solve_single(const Network& net, const CompressibilityModel& model, MomentumMode mode,
                         std::span<const double> loads, int ref_node, double ref_pressure) {
    const int cyc = net.cyclomatic_number();
    const std::vector<double> b = effective_loads(net, loads);
    if (cyc == 0) {
        const std::vector<double> q = solve_tree_flows(net, b);
        const CompositionField comp = propagate_composition(net, q, b);
        const std::vector<double> p =
            propagate_pressure(net, q, comp.edge_eta, model, mode, ref_node, ref_pressure);
        SteadyState st = assemble_state(net, b, q, comp, p);
        st.residuals = compute_residuals(net, model, mode, st);
        return st;
    }
    if (cyc != 1)
        throw ValidationError("solver supports trees and one-cycle networks only");

    CycleSolver cs(net, model, mode, ref_node, ref_pressure, b);
    const double hi = cs.lambda_hi();
    const double g_tol = 1e-3; // Pa
    const double width_tol = 1e-10 * std::max(1.0, hi);

    double lambda_star;
    int iterations = 0;
    CycleEvaluation best;
    if (hi <= width_tol) {
        lambda_star = 0.0;
        best = cs.evaluate(lambda_star);
    } else {
        // pre-scan for the leftmost sign change; g may have several roots
        const int scan = 17;
        std::vector<double> xs(scan), gs(scan);
        int bracket = -1;
        for (int i = 0; i < scan; ++i) {
            xs[i] = hi * static_cast<double>(i) / (scan - 1);
            gs[i] = cs.evaluate(xs[i]).g;
            if (i > 0 && bracket < 0 && gs[i - 1] * gs[i] <= 0.0) bracket = i - 1;
        }
        if (gs.front() > g_tol && gs.back() < -g_tol)
            throw SignConditionFailed("g(0) = " + std::to_string(gs.front()) + " and g(lambda+) = " +
                                      std::to_string(gs.back()) + " have the wrong signs");
        if (bracket < 0) {
            // no sign change: accept the smallest magnitude if it is a root
            int arg = 0;
            for (int i = 1; i < scan; ++i)
                if (std::abs(gs[i]) < std::abs(gs[arg])) arg = i;
            if (std::abs(gs[arg]) > g_tol)
                throw SignConditionFailed("cut residual does not change sign on I_sol; min |g| = " +
                                          std::to_string(std::abs(gs[arg])));
            lambda_star = xs[arg];
            best = cs.evaluate(lambda_star);
        } else {
            double a = xs[bracket], bb = xs[bracket + 1];
            double ga = gs[bracket];
            lambda_star = a;
            best = cs.evaluate(a);
            double gm = ga;
            while (bb - a > width_tol && std::abs(gm) > g_tol && iterations < 200) {
                const double mid = 0.5 * (a + bb);
                CycleEvaluation ev = cs.evaluate(mid);
                ++iterations;
                gm = ev.g;
                lambda_star = mid;
                best = std::move(ev);
                if ((ga <= 0.0 && gm <= 0.0) || (ga > 0.0 && gm > 0.0)) {
                    a = mid;
                    ga = gm;
                } else {
                    bb = mid;
                }
            }
        }
    }

    // map the cut solution back to the original network
    const CutResult& cut = cs.cut();
    const Network& cnet = cut.net;
    SteadyState st;
    const bool flipped = cs.choice().flip_needed;
    for (int v = 0; v < static_cast<int>(net.nodes().size()); ++v) {
        const std::string& id = net.node(v).id;
        const int cv = cnet.node_index(id);
        st.node_pressure[id] = best.p[cv];
        st.node_eta[id] = best.comp.node_eta[cv];
        st.node_load[id] = b[v];
    }
    const int el = cnet.edge_index(cut.el_id);
    for (int e = 0; e < static_cast<int>(net.edges().size()); ++e) {
        const std::string& id = net.edge(e).id;
        if (id == cut.cut_edge.id) {
            st.edge_flow[id] = flipped ? -lambda_star : lambda_star;
            st.edge_eta[id] = best.comp.edge_eta[el];
        } else {
            const int ce = cnet.edge_index(id);
            st.edge_flow[id] = best.q[ce];
            st.edge_eta[id] = best.comp.edge_eta[ce];
        }
    }

    CutDecomposition decomp;
    decomp.cut_edge_id = cut.cut_edge.id;
    decomp.flipped = flipped;
    decomp.beta = cs.beta();
    decomp.lambda_lo = cs.lambda_lo();
    decomp.lambda_hi = cs.lambda_hi();
    decomp.lambda_star = lambda_star;
    decomp.mu_star = best.mu;
    decomp.bisection_iterations = iterations;
    st.cut = std::move(decomp);

    st.residuals = compute_residuals(net, model, mode, st);
    st.residuals.cut_dp = std::abs(best.g);
    st.residuals.cut_deta = std::abs(best.comp.node_eta[cs.vr()] - best.comp.node_eta[cs.vl()]);
    return st;
}

/// Solve J d = rhs in place; small dense system.
std::vector<double> gauss_solve(std::vector<std::vector<double>> J, std::vector<double> rhs) {
    const int n = static_cast<int>(rhs.size());
    for (int c = 0; c < n; ++c) {
        int pivot = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(J[r][c]) > std::abs(J[pivot][c])) pivot = r;
        if (std::abs(J[pivot][c]) < 1e-300)
            throw NoConvergence("singular Jacobian in the mixed-BC outer iteration");
        std::swap(J[c], J[pivot]);
        std::swap(rhs[c], rhs[pivot]);
        for (int r = c + 1; r < n; ++r) {
            const double f = J[r][c] / J[c][c];
            for (int k = c; k < n; ++k) J[r][k] -= f * J[c][k];
            rhs[r] -= f * rhs[c];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = rhs[r];
        for (int k = r + 1; k < n; ++k) s -= J[r][k] * x[k];
        x[r] = s / J[r][r];
    }
    return x;
}

} // namespace

SteadyState solve(const Network& net, const CompressibilityModel& model, MomentumMode mode) {
    const int ref = single_reference_node(net);
    return solve_single(net, model, mode, {}, ref, *net.node(ref).pressure);
}

SteadyState solve_mixed_bc(const Network& net, const CompressibilityModel& model,
                           MomentumMode mode) {
    std::vector<int> supplies;
    for (int v = 0; v < static_cast<int>(net.nodes().size()); ++v)
        if (net.node(v).pressure) supplies.push_back(v);
    if (supplies.size() <= 1) return solve(net, model, mode);
    std::sort(supplies.begin(), supplies.end(), [&](int a, int b) {
        return net.node(a).id < net.node(b).id;
    });

    const int ref = supplies.front();
    const double ref_pressure = *net.node(ref).pressure;
    const std::vector<int> free(supplies.begin() + 1, supplies.end());
    const int m = static_cast<int>(free.size());

    double demand = 0.0;
    for (int v = 0; v < static_cast<int>(net.nodes().size()); ++v)
        if (!net.node(v).pressure) demand += net.node(v).load;

    auto build_loads = [&](const std::vector<double>& x) {
        std::vector<double> loads(net.nodes().size());
        double others = 0.0;
        for (int v = 0; v < static_cast<int>(net.nodes().size()); ++v) {
            loads[v] = net.node(v).pressure ? 0.0 : net.node(v).load;
            if (v != ref) others += loads[v];
        }
        for (int i = 0; i < m; ++i) {
            loads[free[i]] = x[i];
            others += x[i];
        }
        loads[ref] = -others;
        return loads;
    };

    auto eval = [&](const std::vector<double>& x, SteadyState& out) {
        const std::vector<double> loads = build_loads(x);
        out = solve_single(net, model, mode, loads, ref, ref_pressure);
        std::vector<double> r(m);
        for (int i = 0; i < m; ++i)
            r[i] = out.node_pressure.at(net.node(free[i]).id) - *net.node(free[i]).pressure;
        return r;
    };
    auto norm_inf = [](const std::vector<double>& r) {
        double s = 0.0;
        for (double v : r) s = std::max(s, std::abs(v));
        return s;
    };

    // the equal split can be hydraulically infeasible even when a solution
    // exists; try a small ladder of starting points
    std::vector<std::vector<double>> seeds;
    seeds.emplace_back(m, -demand / static_cast<double>(supplies.size()));
    {
        double wsum = 0.0;
        for (int s : supplies) wsum += *net.node(s).pressure * *net.node(s).pressure;
        std::vector<double> seed(m);
        for (int i = 0; i < m; ++i) {
            const double w = *net.node(free[i]).pressure * *net.node(free[i]).pressure;
            seed[i] = -demand * w / wsum;
        }
        seeds.push_back(std::move(seed));
    }
    seeds.emplace_back(m, -0.1 * demand / std::max(1, m));
    seeds.emplace_back(m, -0.02 * demand / std::max(1, m));

    std::vector<double> x;
    SteadyState state;
    std::vector<double> r;
    for (size_t s = 0; s < seeds.size(); ++s) {
        try {
            r = eval(seeds[s], state);
            x = seeds[s];
            break;
        } catch (const Error&) {
            if (s + 1 == seeds.size()) throw;
        }
    }
    const double tol = 10.0; // Pa

    // finite-difference initialization of the Jacobian, secant updates after
    std::vector<std::vector<double>> J(m, std::vector<double>(m, 0.0));
    {
        SteadyState scratch;
        for (int i = 0; i < m; ++i) {
            double delta = std::max(1e-3 * std::abs(x[i]), 0.1);
            bool done = false;
            for (int attempt = 0; attempt < 6 && !done; ++attempt) {
                std::vector<double> xp = x;
                xp[i] += delta;
                try {
                    const std::vector<double> rp = eval(xp, scratch);
                    for (int j = 0; j < m; ++j) J[j][i] = (rp[j] - r[j]) / delta;
                    done = true;
                } catch (const Error&) {
                    delta *= -0.5; // flip and shrink the probe
                }
            }
            if (!done)
                throw NoConvergence("cannot probe the Jacobian around the starting point");
        }
    }

    double best_norm = norm_inf(r);
    for (int it = 0; it < 100; ++it) {
        if (norm_inf(r) <= tol) return state;
        std::vector<double> rhs(m);
        for (int i = 0; i < m; ++i) rhs[i] = -r[i];
        std::vector<double> d = gauss_solve(J, rhs);

        double scale = 1.0;
        std::vector<double> x_new, r_new;
        SteadyState state_new;
        for (int h = 0; h < 7; ++h) {
            x_new = x;
            for (int i = 0; i < m; ++i) x_new[i] += scale * d[i];
            try {
                r_new = eval(x_new, state_new);
            } catch (const Error&) {
                scale *= 0.5; // step left the feasible region, damp and retry
                continue;
            }
            if (norm_inf(r_new) < norm_inf(r) || h == 6) break;
            scale *= 0.5;
        }
        if (r_new.empty())
            throw NoConvergence("mixed-BC step failed inside the feasible region");

        // Broyden update J += (dr - J dx) dx^T / (dx^T dx)
        std::vector<double> dx(m), dr(m);
        double dx2 = 0.0;
        for (int i = 0; i < m; ++i) {
            dx[i] = x_new[i] - x[i];
            dr[i] = r_new[i] - r[i];
            dx2 += dx[i] * dx[i];
        }
        if (dx2 > 0.0) {
            for (int i = 0; i < m; ++i) {
                double jdx = 0.0;
                for (int k = 0; k < m; ++k) jdx += J[i][k] * dx[k];
                const double f = (dr[i] - jdx) / dx2;
                for (int k = 0; k < m; ++k) J[i][k] += f * dx[k];
            }
        }
        x = std::move(x_new);
        r = std::move(r_new);
        state = std::move(state_new);
        best_norm = std::min(best_norm, norm_inf(r));
    }
    if (norm_inf(r) <= tol) return state;
    throw NoConvergence("mixed-BC outer iteration did not converge; best max |dp| = " +
                        std::to_string(best_norm) + " Pa");
}

SteadyState solve_auto(const Network& net, const CompressibilityModel& model, MomentumMode mode) {
    return is_mixed_bc(net) ? solve_mixed_bc(net, model, mode) : solve(net, model, mode);
}

Residuals compute_residuals(const Network& net, const CompressibilityModel& model,
                            MomentumMode mode, const SteadyState& state) {
    Residuals res;
    auto flow = [&](int e) { return state.edge_flow.at(net.edge(e).id); };
    auto eeta = [&](int e) { return state.edge_eta.at(net.edge(e).id); };
    auto press = [&](int v) { return state.node_pressure.at(net.node(v).id); };
    auto neta = [&](int v) { return state.node_eta.at(net.node(v).id); };
    auto load = [&](int v) {
        auto it = state.node_load.find(net.node(v).id);
        return it != state.node_load.end() ? it->second : net.node(v).load;
    };

    for (int v = 0; v < static_cast<int>(net.nodes().size()); ++v) {
        double lhs = -load(v);
        double num = 0.0, den = 0.0;
        for (int e : net.incident_edges(v)) {
            const double aq = net.incidence(v, e) * flow(e);
            lhs += aq;
            if (aq > 0.0) {
                num += eeta(e) * aq;
                den += aq;
            }
        }
        if (load(v) < 0.0 && net.node(v).zeta) {
            num += *net.node(v).zeta * (-load(v));
            den += -load(v);
        }
        res.mass_balance = std::max(res.mass_balance, std::abs(lhs));
        if (den > 0.0) res.mixing = std::max(res.mixing, std::abs(neta(v) - num / den));
    }

    for (int e = 0; e < static_cast<int>(net.edges().size()); ++e) {
        const Edge& ed = net.edge(e);
        const int f = net.from_index(e);
        const int h = net.to_index(e);
        if (ed.kind == EdgeKind::compressor) {
            const double defect = std::abs(press(h) - ed.gamma * press(f));
            res.compressor = std::max(res.compressor, defect / std::max(1.0, press(h)));
            if (flow(e) < -1e-12) res.subsonic_ok = false;
            continue;
        }
        const MassFraction eta(eeta(e));
        const EdgeState es{flow(e), eta};
        const double s = friction_rhs(model.pair(), ed.pipe, es) * ed.pipe.length;
        const double pot_f = mode == MomentumMode::full ? model.potential(eta, es.q, press(f))
                                                        : model.antiderivative(eta, press(f));
        const double pot_h = mode == MomentumMode::full ? model.potential(eta, es.q, press(h))
                                                        : model.antiderivative(eta, press(h));
        const double abs_defect = std::abs(pot_h - pot_f - s);
        res.pressure_abs = std::max(res.pressure_abs, abs_defect);
        res.pressure_rel = std::max(
            res.pressure_rel, abs_defect / std::max({1.0, std::abs(pot_f), std::abs(pot_h)}));
        if (!model.subsonic(eta, es.q, press(f)) || !model.subsonic(eta, es.q, press(h)))
            res.subsonic_ok = false;
    }
    return res;
}

} // namespace gasmix
