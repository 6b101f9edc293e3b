#include "gasmix/pipeflow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gasmix/errors.hpp"

namespace gasmix {

namespace {

double potential_of(const CompressibilityModel& model, MassFraction eta, double q, double p,
                    MomentumMode mode) {
    return mode == MomentumMode::full ? model.potential(eta, q, p)
                                      : model.antiderivative(eta, p);
}

double potential_dp_of(const CompressibilityModel& model, MassFraction eta, double q, double p,
                       MomentumMode mode) {
    if (mode == MomentumMode::full) return model.potential_dp(eta, q, p);
    return p / model.z(eta, p);
}

bool usable_point(const CompressibilityModel& model, MassFraction eta, double q, double p,
                  MomentumMode mode) {
    if (!(p > 0.0)) return false;
    try {
        if (!(model.z(eta, p) > 0.0)) return false;
    } catch (const NonPositiveZ&) {
        return false;
    }
    if (mode == MomentumMode::full && q != 0.0) return model.subsonic(eta, q, p);
    return true;
}

} // namespace

void check(const PipeParams& pipe) {
    if (!(pipe.length >= 0.0)) throw std::invalid_argument("pipe length must be >= 0");
    if (!(pipe.diameter > 0.0)) throw std::invalid_argument("pipe diameter must be positive");
    if (!(pipe.friction >= 0.0)) throw std::invalid_argument("pipe friction factor must be >= 0");
}

double friction_rhs(const GasPair& pair, const PipeParams& pipe, const EdgeState& state) {
    return -(pipe.friction / (2.0 * pipe.diameter)) * rt_over_m(pair, state.eta) * state.q *
           std::abs(state.q);
}

double invert_potential(const CompressibilityModel& model, MassFraction eta, double q, double y,
                        Bracket bracket, MomentumMode mode, double p_hint) {
    double lo = bracket.lo;
    double hi = bracket.hi;
    if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("invalid pressure bracket");

    // shrink the bracket onto the monotone (subsonic, Z > 0) branch
    while (lo < hi && !usable_point(model, eta, q, lo, mode)) lo *= 1.25;
    while (hi > lo && !usable_point(model, eta, q, hi, mode)) hi /= 1.25;
    if (!(lo < hi) || !usable_point(model, eta, q, lo, mode))
        throw NoBracket("no admissible pressure interval for the potential inversion");

    const double f_lo = potential_of(model, eta, q, lo, mode);
    const double f_hi = potential_of(model, eta, q, hi, mode);
    const double accept_tol = std::max(1e-9 * std::abs(y), 1e-4);
    const double polish_tol = std::max(1e-12 * std::abs(y), 1.0);
    if (y < f_lo - accept_tol || y > f_hi + accept_tol)
        throw NoBracket("target potential " + std::to_string(y) + " outside [" +
                        std::to_string(f_lo) + ", " + std::to_string(f_hi) + "]");
    if (y <= f_lo) return lo;
    if (y >= f_hi) return hi;

    double a = lo, b = hi;
    double p = (p_hint > a && p_hint < b) ? p_hint : 0.5 * (a + b);
    double f = potential_of(model, eta, q, p, mode) - y;

    for (int it = 0; it < 50 && std::abs(f) > polish_tol; ++it) {
        if (f > 0.0) b = p; else a = p;
        const double df = potential_dp_of(model, eta, q, p, mode);
        double next = df > 0.0 ? p - f / df : 0.5 * (a + b);
        if (!(next > a) || !(next < b)) next = 0.5 * (a + b);
        p = next;
        f = potential_of(model, eta, q, p, mode) - y;
    }
    for (int it = 0; it < 200 && std::abs(f) > polish_tol && b - a > 1e-15 * b; ++it) {
        if (f > 0.0) b = p; else a = p;
        p = 0.5 * (a + b);
        f = potential_of(model, eta, q, p, mode) - y;
    }
    if (std::abs(f) > accept_tol)
        throw NoBracket("potential inversion stalled, residual " + std::to_string(f));
    return p;
}

double downstream_pressure(const CompressibilityModel& model, const PipeParams& pipe,
                           const EdgeState& state, double p_start, MomentumMode mode) {
    if (!(p_start > 0.0)) throw std::invalid_argument("inlet pressure must be positive");
    const double s = friction_rhs(model.pair(), pipe, state) * pipe.length;
    if (s == 0.0) return p_start;
    if (mode == MomentumMode::full && !model.subsonic(state.eta, state.q, p_start))
        throw SubsonicViolation("inlet state is not subsonic");
    const double y = potential_of(model, state.eta, state.q, p_start, mode) + s;
    return invert_potential(model, state.eta, state.q, y, Bracket{}, mode, p_start);
}

double upstream_pressure(const CompressibilityModel& model, const PipeParams& pipe,
                         const EdgeState& state, double p_end, MomentumMode mode) {
    if (!(p_end > 0.0)) throw std::invalid_argument("outlet pressure must be positive");
    const double s = friction_rhs(model.pair(), pipe, state) * pipe.length;
    if (s == 0.0) return p_end;
    if (mode == MomentumMode::full && !model.subsonic(state.eta, state.q, p_end))
        throw SubsonicViolation("outlet state is not subsonic");
    const double y = potential_of(model, state.eta, state.q, p_end, mode) - s;
    return invert_potential(model, state.eta, state.q, y, Bracket{}, mode, p_end);
}

std::vector<ProfilePoint> pressure_profile(const CompressibilityModel& model,
                                           const PipeParams& pipe, const EdgeState& state,
                                           double p_start, int n_samples, MomentumMode mode) {
    if (n_samples < 2) throw std::invalid_argument("profile needs at least two samples");
    std::vector<ProfilePoint> out;
    out.reserve(n_samples);
    const double rhs = friction_rhs(model.pair(), pipe, state);
    const double f0 = potential_of(model, state.eta, state.q, p_start, mode);
    double hint = p_start;
    for (int i = 0; i < n_samples; ++i) {
        const double x = pipe.length * static_cast<double>(i) / (n_samples - 1);
        double p;
        if (rhs == 0.0 || x == 0.0) {
            p = p_start;
        } else {
            p = invert_potential(model, state.eta, state.q, f0 + rhs * x, Bracket{}, mode, hint);
            hint = p;
        }
        out.push_back(ProfilePoint{x, p});
    }
    return out;
}

double compressor_out(double gamma, double p_in) {
    if (!(gamma >= 1.0)) throw std::invalid_argument("compressor ratio must be >= 1");
    if (!(p_in > 0.0)) throw std::invalid_argument("compressor inlet pressure must be positive");
    return gamma * p_in;
}

} // namespace gasmix
