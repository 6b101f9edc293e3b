#ifndef GASMIX_SOLVER_HPP
#define GASMIX_SOLVER_HPP

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gasmix/eos.hpp"
#include "gasmix/network.hpp"

namespace gasmix {

/// Residual diagnostics of a steady state against the full model equations.
struct Residuals {
    double mass_balance = 0.0;   ///< max |A q - b|
    double mixing = 0.0;         ///< max nodal mixing defect
    double pressure_abs = 0.0;   ///< max |Delta F - S| over pipes, Pa^2
    double pressure_rel = 0.0;   ///< same, relative to max(1, |F|)
    double compressor = 0.0;     ///< max relative |p_h - gamma p_f|
    double cut_dp = 0.0;         ///< |p_vr - p_vl| at lambda*, Pa (cycle case)
    double cut_deta = 0.0;       ///< |eta_vr - eta_vl| at lambda* (cycle case)
    bool subsonic_ok = true;
};

/// Record of the cycle decomposition that produced a solution.
struct CutDecomposition {
    std::string cut_edge_id;
    bool flipped = false;
    std::vector<std::pair<std::string, double>> beta; ///< cycle edge id -> beta_e
    double lambda_lo = 0.0, lambda_hi = 0.0;          ///< I_sol
    double lambda_star = 0.0;
    double mu_star = 0.0;
    int bisection_iterations = 0;
};

struct SteadyState {
    std::map<std::string, double> node_pressure; ///< Pa
    std::map<std::string, double> node_eta;
    std::map<std::string, double> node_load;     ///< realized b_v (mixed BC fills supplies)
    std::map<std::string, double> edge_flow;     ///< kg/(m^2 s), edge orientation
    std::map<std::string, double> edge_eta;
    Residuals residuals;
    std::optional<CutDecomposition> cut;
};

/// Unique flows with A q = b on a tree, by iterative leaf elimination.
/// loads overrides the nodal loads when non-empty.
std::vector<double> solve_tree_flows(const Network& net, std::span<const double> loads = {});

struct CompositionField {
    std::vector<double> node_eta;
    std::vector<double> edge_eta;
};

/// Nodal and edge mass fractions on a tree with known flows, processed in
/// topological order of the flow digraph. zeta_override replaces individual
/// supply compositions (node index -> zeta).
CompositionField propagate_composition(const Network& net, const std::vector<double>& q,
                                       std::span<const double> loads = {},
                                       const std::map<int, double>& zeta_override = {});

/// Nodal pressures on a tree, breadth-first from the reference node.
std::vector<double> propagate_pressure(const Network& net, const std::vector<double>& q,
                                       const std::vector<double>& edge_eta,
                                       const CompressibilityModel& model, MomentumMode mode,
                                       int ref_node, double ref_pressure);

/// Cycle-node loads corrected by the lambda-independent flows of the tree
/// branches hanging off the cycle.
std::vector<double> modified_loads(const Network& net, const CycleInfo& cycle,
                                   const std::vector<double>& q,
                                   std::span<const double> loads = {});

/// Start index k* (1-based) such that all wrapped partial sums T_i(k*) of a
/// zero-sum sequence are non-negative: k* = (m mod n) + 1 with m the largest
/// index attaining the minimum prefix sum.
int wrapped_partial_sums_start(std::span<const double> y);

/// Cut edge choice: maps k* to the cycle edge between v_{k*-1} and v_{k*};
/// flip_needed when that edge is oriented against the traversal.
struct CutChoice {
    std::string edge_id;
    bool flip_needed = false;
    int start_position = 0; ///< 0-based position of v_{k*} in cycle.nodes
};

CutChoice select_cut_edge(const Network& net, const CycleInfo& cycle,
                          const std::vector<double>& modified);

/// Roots of the cycle-edge flows with respect to lambda, in the post-cut
/// numbering (prefix sums of the modified loads), plus I_sol. After a cut
/// chosen by select_cut_edge, every beta is non-negative and I_sol = [0, max].
struct BetaResult {
    std::vector<std::pair<std::string, double>> beta; ///< cycle edge id -> beta_e
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
};

BetaResult beta_values(const Network& net, const CycleInfo& cycle,
                       const std::vector<double>& modified, const CutChoice& choice);

/// Root curve of the composition residual: the mass fraction arriving at v_l
/// of the cut network under boundary data b_vl = lambda, b_vr = -lambda.
/// Setting the v_r supply composition to this value makes H_eta vanish.
/// base_loads overrides the pre-cut nodes' loads when non-empty.
MassFraction mu_eta(const CutResult& cut, double lambda, std::span<const double> base_loads = {});

/// Steady state on a valid network with a single reference pressure.
/// Dispatches between the tree path and the cycle decomposition.
SteadyState solve(const Network& net, const CompressibilityModel& model,
                  MomentumMode mode = MomentumMode::full);

/// Steady state with pressures prescribed at every supply and loads at the
/// demands; the supply inflows are found by a damped quasi-Newton outer
/// iteration (the reference supply absorbs the mass balance).
SteadyState solve_mixed_bc(const Network& net, const CompressibilityModel& model,
                           MomentumMode mode = MomentumMode::full);

/// Dispatch on the boundary-condition style of the document.
SteadyState solve_auto(const Network& net, const CompressibilityModel& model,
                       MomentumMode mode = MomentumMode::full);

/// Full-model residual suite for a state on a network (also recomputed
/// internally by the solve functions).
Residuals compute_residuals(const Network& net, const CompressibilityModel& model,
                            MomentumMode mode, const SteadyState& state);

} // namespace gasmix

#endif
