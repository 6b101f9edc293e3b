#ifndef GASMIX_PIPEFLOW_HPP
#define GASMIX_PIPEFLOW_HPP

#include <vector>

#include "gasmix/eos.hpp"
#include "gasmix/gas.hpp"

namespace gasmix {

/// Which momentum balance the pressure relation uses: the full isothermal
/// Euler potential F, or the semi-linear variant that keeps only the
/// antiderivative A (friction-dominated flow).
enum class MomentumMode { full, semilinear };

struct PipeParams {
    double length = 0.0;   ///< m
    double diameter = 0.5; ///< m
    double friction = 0.0; ///< dimensionless lambda_fr
};

void check(const PipeParams& pipe);

/// Flow and composition, both constant along a pipe in steady state.
struct EdgeState {
    double q = 0.0;        ///< kg/(m^2 s), signed by edge orientation
    MassFraction eta{0.0};
};

/// Right-hand side of the potential relation per metre of pipe:
/// -(lambda_fr/(2 D)) (R T / M(eta)) q|q|, in Pa^2/m.
double friction_rhs(const GasPair& pair, const PipeParams& pipe, const EdgeState& state);

struct Bracket {
    double lo = 1.0e4; ///< Pa
    double hi = 2.0e7; ///< Pa
};

/// Solve F(eta, q, p) = y for p on the given bracket by safeguarded Newton
/// with bisection fallback. Convergence is on |F - y|, not |dp|:
/// |F(p) - y| <= max(1e-9 |y|, 1e-4 Pa^2). Throws NoBracket when y is not
/// attainable on the admissible (subsonic, Z > 0) part of the bracket.
double invert_potential(const CompressibilityModel& model, MassFraction eta, double q, double y,
                        Bracket bracket, MomentumMode mode, double p_hint = 0.0);

/// Pressure at the head of a pipe given the pressure at its foot.
double downstream_pressure(const CompressibilityModel& model, const PipeParams& pipe,
                           const EdgeState& state, double p_start, MomentumMode mode);

/// Pressure at the foot of a pipe given the pressure at its head.
double upstream_pressure(const CompressibilityModel& model, const PipeParams& pipe,
                         const EdgeState& state, double p_end, MomentumMode mode);

struct ProfilePoint {
    double x = 0.0; ///< m from the pipe foot
    double p = 0.0; ///< Pa
};

/// n_samples points of the pressure profile along a pipe, x uniform on [0, L].
std::vector<ProfilePoint> pressure_profile(const CompressibilityModel& model,
                                           const PipeParams& pipe, const EdgeState& state,
                                           double p_start, int n_samples, MomentumMode mode);

/// p_out = gamma * p_in.
double compressor_out(double gamma, double p_in);

} // namespace gasmix

#endif
