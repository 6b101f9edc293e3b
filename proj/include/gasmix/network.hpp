#ifndef GASMIX_NETWORK_HPP
#define GASMIX_NETWORK_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gasmix/pipeflow.hpp"

namespace gasmix {

struct Node {
    std::string id;
    double load = 0.0;                   ///< b_v in kg/(m^2 s); negative at supplies
    std::optional<double> zeta;          ///< supply mass fraction
    std::optional<double> pressure;      ///< boundary pressure, Pa
};

enum class EdgeKind { pipe, compressor, valve };

struct Edge {
    std::string id;
    std::string from; ///< foot node f(e)
    std::string to;   ///< head node h(e)
    EdgeKind kind = EdgeKind::pipe;
    PipeParams pipe{};
    double gamma = 1.0; ///< compressor ratio, >= 1
};

/// Directed multigraph of nodes and typed edges with eagerly built incidence
/// indices. Immutable after construction. Construction checks structural
/// integrity only (unique ids, known endpoints, no self loops); the model
/// invariants are reported by validate().
class Network {
public:
    Network(std::vector<Node> nodes, std::vector<Edge> edges);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Node& node(int i) const { return nodes_[i]; }
    const Edge& edge(int i) const { return edges_[i]; }

    int node_index(const std::string& id) const; ///< throws UnknownEdge-style errors
    int edge_index(const std::string& id) const;
    bool has_node(const std::string& id) const;

    int from_index(int edge) const { return edge_from_[edge]; }
    int to_index(int edge) const { return edge_to_[edge]; }

    /// Incidence entry a(v,e): +1 at the head, -1 at the foot, 0 otherwise.
    int incidence(int node, int edge) const;
    int other_end(int edge, int node) const;
    const std::vector<int>& incident_edges(int node) const { return incident_[node]; }

    bool connected() const;
    /// |E| - |V| + 1 for a connected graph: 0 tree, 1 single cycle.
    int cyclomatic_number() const;

private:
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<int> edge_from_, edge_to_;
    std::vector<std::vector<int>> incident_;
    std::map<std::string, int> node_by_id_, edge_by_id_;
};

/// List of violated model invariants; empty means valid.
std::vector<std::string> validate(const Network& net);

/// True when more than one node carries a boundary pressure (supply
/// pressures prescribed, supply loads free).
bool is_mixed_bc(const Network& net);

/// The unique cycle in traversal order: edges[i] connects nodes[i] and
/// nodes[(i+1) % n]. Traversal starts at the lexicographically smallest
/// cycle-node id and proceeds toward its smaller-id cycle neighbour.
struct CycleInfo {
    std::vector<int> nodes;
    std::vector<int> edges;
};

/// nullopt for trees; throws MultipleCycles when |E|-|V|+1 > 1.
std::optional<CycleInfo> find_cycle(const Network& net);

/// Tree obtained by severing one cycle edge e=(f,h): two new nodes v_l, v_r
/// and two friction-free placeholder edges e_l=(f, v_l), e_r=(v_r, h). The
/// severed edge itself is kept as reconnection metadata so the cycle solver
/// can enforce its own pressure relation across the cut.
struct CutResult {
    Network net;
    Edge cut_edge;      ///< the original edge (orientation as in the input net)
    std::string vl_id, vr_id;
    std::string el_id, er_id;
};

CutResult cut_network(const Network& net, const std::string& cut_edge_id);

/// Copy of the network with one pipe/valve edge's orientation reversed.
/// Solutions map back by negating the flipped edge's flow.
Network flip_edge(const Network& net, const std::string& edge_id);

} // namespace gasmix

#endif
