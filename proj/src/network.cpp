#include "gasmix/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "gasmix/errors.hpp"

namespace gasmix {

Network::Network(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
        if (!node_by_id_.emplace(nodes_[i].id, i).second)
            throw ValidationError("duplicate node id '" + nodes_[i].id + "'");
    }
    incident_.resize(nodes_.size());
    edge_from_.resize(edges_.size());
    edge_to_.resize(edges_.size());
    for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
        Edge& e = edges_[i];
        if (!edge_by_id_.emplace(e.id, i).second)
            throw ValidationError("duplicate edge id '" + e.id + "'");
        auto from = node_by_id_.find(e.from);
        auto to = node_by_id_.find(e.to);
        if (from == node_by_id_.end() || to == node_by_id_.end())
            throw ValidationError("edge '" + e.id + "' references an unknown node");
        if (from->second == to->second)
            throw ValidationError("edge '" + e.id + "' is a self loop");
        if (e.kind == EdgeKind::valve) {
            // a valve is a friction-free pipe
            e.pipe = PipeParams{0.0, e.pipe.diameter > 0.0 ? e.pipe.diameter : 0.5, 0.0};
        }
        edge_from_[i] = from->second;
        edge_to_[i] = to->second;
        incident_[from->second].push_back(i);
        incident_[to->second].push_back(i);
    }
}

int Network::node_index(const std::string& id) const {
    auto it = node_by_id_.find(id);
    if (it == node_by_id_.end()) throw UnknownEdge("unknown node id '" + id + "'");
    return it->second;
}

bool Network::has_node(const std::string& id) const { return node_by_id_.count(id) > 0; }

int Network::edge_index(const std::string& id) const {
    auto it = edge_by_id_.find(id);
    if (it == edge_by_id_.end()) throw UnknownEdge("unknown edge id '" + id + "'");
    return it->second;
}

int Network::incidence(int node, int edge) const {
    if (edge_to_[edge] == node) return 1;
    if (edge_from_[edge] == node) return -1;
    return 0;
}

int Network::other_end(int edge, int node) const {
    return edge_from_[edge] == node ? edge_to_[edge] : edge_from_[edge];
}

bool Network::connected() const {
    if (nodes_.empty()) return true;
    std::vector<char> seen(nodes_.size(), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    int count = 1;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int e : incident_[v]) {
            const int w = other_end(e, v);
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                queue.push_back(w);
            }
        }
    }
    return count == static_cast<int>(nodes_.size());
}

int Network::cyclomatic_number() const {
    return static_cast<int>(edges_.size()) - static_cast<int>(nodes_.size()) + 1;
}

bool is_mixed_bc(const Network& net) {
    int n = 0;
    for (const Node& v : net.nodes())
        if (v.pressure) ++n;
    return n > 1;
}

std::vector<std::string> validate(const Network& net) {
    std::vector<std::string> out;
    if (!net.connected()) out.push_back("network is not connected");
    const int cyc = net.cyclomatic_number();
    if (cyc < 0 || cyc > 1)
        out.push_back("cycle count " + std::to_string(cyc) + " outside {0, 1}");

    const bool mixed = is_mixed_bc(net);
    int pressure_count = 0;
    double load_sum = 0.0, load_scale = 0.0;
    for (const Node& v : net.nodes()) {
        if (!std::isfinite(v.load)) out.push_back("node '" + v.id + "': load is not finite");
        if (v.pressure) {
            ++pressure_count;
            if (!(*v.pressure > 0.0)) out.push_back("node '" + v.id + "': pressure spec must be positive");
        }
        if (v.zeta && (*v.zeta < 0.0 || *v.zeta > 1.0))
            out.push_back("node '" + v.id + "': zeta outside [0,1]");
        load_sum += v.load;
        load_scale += std::abs(v.load);
        if (mixed) {
            if (v.pressure) {
                if (!v.zeta) out.push_back("node '" + v.id + "': pressure-specified supply is missing zeta");
                if (v.load != 0.0)
                    out.push_back("node '" + v.id + "': supply load must stay free in mixed-BC mode");
            } else {
                if (v.load < 0.0)
                    out.push_back("node '" + v.id + "': negative load without a pressure spec in mixed-BC mode");
                if (v.zeta && v.load >= 0.0 && !v.pressure)
                    out.push_back("node '" + v.id + "': zeta on a demand node");
            }
        } else {
            if (v.load < 0.0 && !v.zeta)
                out.push_back("node '" + v.id + "': supply is missing zeta");
            if (v.zeta && v.load > 0.0)
                out.push_back("node '" + v.id + "': zeta on a demand node");
        }
    }
    if (!mixed) {
        if (pressure_count == 0) out.push_back("no pressure reference node");
        if (std::abs(load_sum) > 1e-9 * std::max(1.0, load_scale))
            out.push_back("unbalanced loads: sum b = " + std::to_string(load_sum));
    }

    // compressor placement rules
    std::set<int> cycle_edges;
    if (cyc == 1) {
        try {
            if (auto cycle = find_cycle(net))
                cycle_edges.insert(cycle->edges.begin(), cycle->edges.end());
        } catch (const Error&) {
            // unreachable when cyc == 1; placement checks are skipped if it is not
        }
    }
    for (int i = 0; i < static_cast<int>(net.edges().size()); ++i) {
        const Edge& e = net.edge(i);
        if (e.kind == EdgeKind::compressor) {
            if (!(e.gamma >= 1.0))
                out.push_back("compressor '" + e.id + "': gamma " + std::to_string(e.gamma) + " < 1");
            if (cycle_edges.count(i)) out.push_back("compressor '" + e.id + "' lies on the cycle");
            for (int j = 0; j < static_cast<int>(net.edges().size()); ++j) {
                if (j == i) continue;
                const Edge& o = net.edge(j);
                const bool parallel = (o.from == e.from && o.to == e.to) ||
                                      (o.from == e.to && o.to == e.from);
                if (parallel)
                    out.push_back("compressor '" + e.id + "' runs parallel to edge '" + o.id + "'");
            }
        } else if (e.kind == EdgeKind::pipe) {
            if (!(e.pipe.length >= 0.0)) out.push_back("pipe '" + e.id + "': negative length");
            if (!(e.pipe.diameter > 0.0)) out.push_back("pipe '" + e.id + "': non-positive diameter");
            if (!(e.pipe.friction >= 0.0)) out.push_back("pipe '" + e.id + "': negative friction factor");
        }
    }
    return out;
}

namespace {

struct SpanningTree {
    std::vector<int> parent_node, parent_edge, depth;
    std::vector<int> extra_edges; // non-tree edges
};

SpanningTree build_spanning_tree(const Network& net) {
    const int n = static_cast<int>(net.nodes().size());
    SpanningTree t;
    t.parent_node.assign(n, -1);
    t.parent_edge.assign(n, -1);
    t.depth.assign(n, -1);
    std::vector<char> edge_used(net.edges().size(), 0);
    std::deque<int> queue{0};
    t.depth[0] = 0;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int e : net.incident_edges(v)) {
            const int w = net.other_end(e, v);
            if (t.depth[w] < 0) {
                t.depth[w] = t.depth[v] + 1;
                t.parent_node[w] = v;
                t.parent_edge[w] = e;
                edge_used[e] = 1;
                queue.push_back(w);
            }
        }
    }
    for (int e = 0; e < static_cast<int>(net.edges().size()); ++e)
        if (!edge_used[e] && t.parent_edge[net.from_index(e)] != e && t.parent_edge[net.to_index(e)] != e)
            t.extra_edges.push_back(e);
    return t;
}

} // namespace

std::optional<CycleInfo> find_cycle(const Network& net) {
    if (!net.connected()) throw ValidationError("find_cycle requires a connected network");
    const SpanningTree tree = build_spanning_tree(net);
    if (tree.extra_edges.empty()) return std::nullopt;
    if (tree.extra_edges.size() > 1)
        throw MultipleCycles("network has " + std::to_string(tree.extra_edges.size()) +
                             " independent cycles");

    const int back = tree.extra_edges.front();
    int u = net.from_index(back);
    int v = net.to_index(back);

    // climb to the least common ancestor, recording both legs
    std::vector<int> u_nodes{u}, u_edges, v_nodes{v}, v_edges;
    int a = u, b = v;
    while (tree.depth[a] > tree.depth[b]) {
        u_edges.push_back(tree.parent_edge[a]);
        a = tree.parent_node[a];
        u_nodes.push_back(a);
    }
    while (tree.depth[b] > tree.depth[a]) {
        v_edges.push_back(tree.parent_edge[b]);
        b = tree.parent_node[b];
        v_nodes.push_back(b);
    }
    while (a != b) {
        u_edges.push_back(tree.parent_edge[a]);
        a = tree.parent_node[a];
        u_nodes.push_back(a);
        v_edges.push_back(tree.parent_edge[b]);
        b = tree.parent_node[b];
        v_nodes.push_back(b);
    }

    // cycle sequence u .. lca .. v with the back edge closing v -> u
    CycleInfo cycle;
    cycle.nodes = u_nodes;
    cycle.edges = u_edges;
    for (int i = static_cast<int>(v_nodes.size()) - 2; i >= 0; --i) {
        cycle.nodes.push_back(v_nodes[i]);
        cycle.edges.push_back(v_edges[i]);
    }
    cycle.edges.push_back(back);

    // canonical start and direction
    const int n = static_cast<int>(cycle.nodes.size());
    int s = 0;
    for (int i = 1; i < n; ++i)
        if (net.node(cycle.nodes[i]).id < net.node(cycle.nodes[s]).id) s = i;
    const int fwd = cycle.nodes[(s + 1) % n];
    const int bwd = cycle.nodes[(s + n - 1) % n];
    bool forward;
    if (net.node(fwd).id != net.node(bwd).id) {
        forward = net.node(fwd).id < net.node(bwd).id;
    } else {
        // two-node cycle of parallel edges: break the tie on edge ids
        forward = net.edge(cycle.edges[s]).id < net.edge(cycle.edges[(s + n - 1) % n]).id;
    }
    CycleInfo canon;
    canon.nodes.resize(n);
    canon.edges.resize(n);
    for (int i = 0; i < n; ++i) {
        if (forward) {
            canon.nodes[i] = cycle.nodes[(s + i) % n];
            canon.edges[i] = cycle.edges[(s + i) % n];
        } else {
            canon.nodes[i] = cycle.nodes[(s - i + n) % n];
            canon.edges[i] = cycle.edges[(s - i - 1 + 2 * n) % n];
        }
    }
    return canon;
}

CutResult cut_network(const Network& net, const std::string& cut_edge_id) {
    const int cut = net.edge_index(cut_edge_id);
    auto cycle = find_cycle(net);
    if (!cycle || std::find(cycle->edges.begin(), cycle->edges.end(), cut) == cycle->edges.end())
        throw NotACycleEdge("edge '" + cut_edge_id + "' does not lie on the cycle");

    const Edge original = net.edge(cut);
    std::vector<Node> nodes = net.nodes();
    std::vector<Edge> edges;
    edges.reserve(net.edges().size() + 1);
    for (int i = 0; i < static_cast<int>(net.edges().size()); ++i)
        if (i != cut) edges.push_back(net.edge(i));

    CutResult result{Network({}, {}), original, cut_edge_id + "::vl", cut_edge_id + "::vr",
                     cut_edge_id + "::el", cut_edge_id + "::er"};
    nodes.push_back(Node{result.vl_id, 0.0, std::nullopt, std::nullopt});
    nodes.push_back(Node{result.vr_id, 0.0, std::nullopt, std::nullopt});
    edges.push_back(Edge{result.el_id, original.from, result.vl_id, EdgeKind::valve, {}, 1.0});
    edges.push_back(Edge{result.er_id, result.vr_id, original.to, EdgeKind::valve, {}, 1.0});
    result.net = Network(std::move(nodes), std::move(edges));
    return result;
}

Network flip_edge(const Network& net, const std::string& edge_id) {
    const int idx = net.edge_index(edge_id);
    if (net.edge(idx).kind == EdgeKind::compressor)
        throw CannotFlipCompressor("compressor '" + edge_id + "' cannot be flipped");
    std::vector<Node> nodes = net.nodes();
    std::vector<Edge> edges = net.edges();
    std::swap(edges[idx].from, edges[idx].to);
    return Network(std::move(nodes), std::move(edges));
}

} // namespace gasmix
