#include <doctest.h>

#include <cmath>
#include <random>

#include "gasmix/errors.hpp"
#include "gasmix/pipeflow.hpp"

using namespace gasmix;

namespace {

const GasPair kGas = example_gas();

/// Fourth-order explicit integration of the reduced pressure ODE
/// dp/dx = rhs / F'(p); independent of the potential-inversion path.
double integrate_pressure_ode(const CompressibilityModel& model, const PipeParams& pipe,
                              const EdgeState& state, double p_start, MomentumMode mode,
                              int steps) {
    const double rhs = friction_rhs(model.pair(), pipe, state);
    auto slope = [&](double p) {
        const double dfdp = mode == MomentumMode::full
                                ? model.potential_dp(state.eta, state.q, p)
                                : p / model.z(state.eta, p);
        return rhs / dfdp;
    };
    const double h = pipe.length / steps;
    double p = p_start;
    for (int i = 0; i < steps; ++i) {
        const double k1 = slope(p);
        const double k2 = slope(p + 0.5 * h * k1);
        const double k3 = slope(p + 0.5 * h * k2);
        const double k4 = slope(p + h * k3);
        p += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return p;
}

} // namespace

TEST_CASE("friction right-hand side") {
    PipeParams pipe{1.0, 0.5, 0.05};
    CHECK(friction_rhs(kGas, pipe, EdgeState{0.0, MassFraction(0.5)}) == 0.0);
    CHECK(friction_rhs(kGas, pipe, EdgeState{10.0, MassFraction(0.5)}) < 0.0);
    CHECK(friction_rhs(kGas, pipe, EdgeState{-10.0, MassFraction(0.5)}) > 0.0);
    // lambda=0.05, D=0.5, q=100, pure NG: -(0.05/1) * (RT/M_NG) * 1e4
    const double expected = -0.05 * rt_over_m(kGas, MassFraction(0.0)) * 1e4;
    CHECK(friction_rhs(kGas, pipe, EdgeState{100.0, MassFraction(0.0)}) ==
          doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(-6.537e7).epsilon(1e-3));
}

TEST_CASE("potential inversion round trips") {
    const auto constant = CompressibilityModel::constant(kGas, 1.0);
    // q = 0, Z = 1: invert p^2/2 = y
    const double y = 0.5 * 4.2e6 * 4.2e6;
    CHECK(invert_potential(constant, MassFraction(0.0), 0.0, y, Bracket{}, MomentumMode::full) ==
          doctest::Approx(4.2e6).epsilon(1e-10));

    const auto linear = CompressibilityModel::linear(kGas);
    const MassFraction eta(0.3);
    const double q = 80.0;
    for (double p_star : {5e5, 2e6, 6e6, 1.2e7}) {
        const double target = linear.potential(eta, q, p_star);
        const double p = invert_potential(linear, eta, q, target, Bracket{}, MomentumMode::full);
        CHECK(p == doctest::Approx(p_star).epsilon(1e-9));
        CHECK(std::abs(linear.potential(eta, q, p) - target) <=
              std::max(1e-9 * std::abs(target), 1e-4));
    }
}

TEST_CASE("inversion reports unattainable targets") {
    const auto constant = CompressibilityModel::constant(kGas, 1.0);
    CHECK_THROWS_AS(
        invert_potential(constant, MassFraction(0.0), 0.0, -1e15, Bracket{}, MomentumMode::full),
        NoBracket);
    CHECK_THROWS_AS(
        invert_potential(constant, MassFraction(0.0), 0.0, 1e30, Bracket{}, MomentumMode::full),
        NoBracket);
}

TEST_CASE("semilinear constant model reproduces the Weymouth closed form") {
    const auto constant = CompressibilityModel::constant(kGas, 1.0);
    PipeParams pipe{1e4, 0.5, 0.05};
    EdgeState state{100.0, MassFraction(0.0)};
    const double p0 = 60e5;
    const double rtm = rt_over_m(kGas, MassFraction(0.0));
    const double expected = std::sqrt(p0 * p0 - (0.05 / 0.5) * rtm * state.q * state.q * pipe.length);
    const double p1 = downstream_pressure(constant, pipe, state, p0, MomentumMode::semilinear);
    CHECK(p1 == doctest::Approx(expected).epsilon(1e-10));
    CHECK(p1 / 1e5 == doctest::Approx(58.90).epsilon(1e-4));
    // and back up
    CHECK(upstream_pressure(constant, pipe, state, p1, MomentumMode::semilinear) ==
          doctest::Approx(p0).epsilon(1e-10));
}

TEST_CASE("zero flow and zero friction leave the pressure unchanged exactly") {
    const auto papay = CompressibilityModel::papay(kGas);
    PipeParams pipe{2e4, 0.5, 0.05};
    CHECK(downstream_pressure(papay, pipe, EdgeState{0.0, MassFraction(0.5)}, 55e5,
                              MomentumMode::full) == 55e5);
    PipeParams valve{2e4, 0.5, 0.0};
    CHECK(downstream_pressure(papay, valve, EdgeState{120.0, MassFraction(0.5)}, 55e5,
                              MomentumMode::full) == 55e5);
    PipeParams zero_length{0.0, 0.5, 0.05};
    CHECK(downstream_pressure(papay, zero_length, EdgeState{120.0, MassFraction(0.5)}, 55e5,
                              MomentumMode::full) == 55e5);
}

TEST_CASE("downstream pressure agrees with direct ODE integration") {
    std::mt19937 rng(20240811u);
    std::uniform_real_distribution<double> eta_d(0.0, 1.0), q_d(30.0, 180.0), p_d(45e5, 68e5),
        len_d(2e3, 1.5e4);
    CustomZ wrapped;
    wrapped.z = [](double eta, double p) {
        const GasPair g = example_gas();
        const double alpha = eta * alpha_coefficient(g.h2, g.T) + (1.0 - eta) * alpha_coefficient(g.ng, g.T);
        return 1.0 + alpha * p;
    };
    const CompressibilityModel models[] = {
        CompressibilityModel::constant(kGas, 1.0), CompressibilityModel::linear(kGas),
        CompressibilityModel::papay(kGas), CompressibilityModel::custom(kGas, wrapped)};

    int done = 0;
    while (done < 12) {
        const auto& model = models[done % 4];
        const MomentumMode mode = done % 2 ? MomentumMode::full : MomentumMode::semilinear;
        const PipeParams pipe{len_d(rng), 0.5, 0.05};
        EdgeState state{q_d(rng) * (done % 3 == 2 ? -1.0 : 1.0), MassFraction(eta_d(rng))};
        const double p0 = p_d(rng);
        if (!model.subsonic(state.eta, state.q, p0)) continue;
        double p_alg;
        try {
            p_alg = downstream_pressure(model, pipe, state, p0, mode);
        } catch (const Error&) {
            continue;
        }
        const double p_ode = integrate_pressure_ode(model, pipe, state, p0, mode, 10000);
        CHECK(std::abs(p_alg - p_ode) / p_ode <= 1e-6);
        ++done;
    }
}

TEST_CASE("pressure decreases in the flow direction") {
    const auto linear = CompressibilityModel::linear(kGas);
    std::mt19937 rng(7u);
    std::uniform_real_distribution<double> eta_d(0.0, 1.0), q_d(5.0, 150.0), p_d(40e5, 70e5);
    for (int i = 0; i < 20; ++i) {
        const PipeParams pipe{1e4, 0.5, 0.05};
        const double q = q_d(rng);
        const MassFraction eta(eta_d(rng));
        const double p0 = p_d(rng);
        const double fwd = downstream_pressure(linear, pipe, EdgeState{q, eta}, p0, MomentumMode::full);
        CHECK(fwd < p0);
        const double bwd = downstream_pressure(linear, pipe, EdgeState{-q, eta}, p0, MomentumMode::full);
        CHECK(bwd > p0);
        // reversibility
        CHECK(upstream_pressure(linear, pipe, EdgeState{q, eta}, fwd, MomentumMode::full) ==
              doctest::Approx(p0).epsilon(1e-8));
    }
}

TEST_CASE("pressure profile") {
    const auto constant = CompressibilityModel::constant(kGas, 1.0);
    PipeParams pipe{1e4, 0.5, 0.05};
    EdgeState state{90.0, MassFraction(0.25)};
    const auto profile = pressure_profile(constant, pipe, state, 60e5, 11, MomentumMode::full);
    REQUIRE(profile.size() == 11);
    CHECK(profile.front().x == 0.0);
    CHECK(profile.front().p == 60e5);
    CHECK(profile.back().x == doctest::Approx(pipe.length));
    CHECK(profile.back().p ==
          doctest::Approx(downstream_pressure(constant, pipe, state, 60e5, MomentumMode::full))
              .epsilon(1e-10));
    for (size_t i = 1; i < profile.size(); ++i) {
        CHECK(profile[i].x - profile[i - 1].x == doctest::Approx(1e3).epsilon(1e-12));
        CHECK(profile[i].p < profile[i - 1].p);
    }

    const auto flat = pressure_profile(constant, pipe, EdgeState{0.0, MassFraction(0.25)}, 60e5, 5,
                                       MomentumMode::full);
    for (const auto& pt : flat) CHECK(pt.p == 60e5);
}

TEST_CASE("compressor relation") {
    CHECK(compressor_out(1.0, 50e5) == 50e5);
    CHECK(compressor_out(1.2, 50e5) == doctest::Approx(60e5));
    CHECK_THROWS_AS(compressor_out(0.9, 50e5), std::invalid_argument);
}
