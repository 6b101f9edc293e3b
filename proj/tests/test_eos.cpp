#include <doctest.h>

#include <cmath>
#include <vector>

#include "gasmix/eos.hpp"
#include "gasmix/errors.hpp"
#include "gasmix/quadrature.hpp"

using namespace gasmix;

namespace {

const GasPair kGas = example_gas();

std::vector<CompressibilityModel> all_models() {
    CustomZ wrapped; // linear formula through the custom interface, no analytic extras
    wrapped.z = [](double eta, double p) {
        const GasPair g = example_gas();
        const double alpha = eta * alpha_coefficient(g.h2, g.T) + (1.0 - eta) * alpha_coefficient(g.ng, g.T);
        return 1.0 + alpha * p;
    };
    return {CompressibilityModel::constant(kGas, 1.0), CompressibilityModel::linear(kGas),
            CompressibilityModel::papay(kGas, CriticalMixing::mass),
            CompressibilityModel::papay(kGas, CriticalMixing::molar),
            CompressibilityModel::custom(kGas, wrapped)};
}

} // namespace

TEST_CASE("alpha coefficients from the critical point data") {
    const double a_h2 = alpha_coefficient(kGas.h2, kGas.T);
    const double a_ng = alpha_coefficient(kGas.ng, kGas.T);
    const double direct_h2 = 0.257 / 13.15e5 - 0.5333 * 33.19 / (13.15e5 * 283.15);
    const double direct_ng = 0.257 / 46.01e5 - 0.5333 * 204.62 / (46.01e5 * 283.15);
    CHECK(a_h2 == doctest::Approx(direct_h2).epsilon(1e-14));
    CHECK(a_ng == doctest::Approx(direct_ng).epsilon(1e-14));
    CHECK(a_h2 == doctest::Approx(1.479e-7).epsilon(1e-3));
    CHECK(a_ng == doctest::Approx(-2.790e-8).epsilon(1e-3));
    // second term vanishes as T_c -> 0
    GasComponent cold = kGas.h2;
    cold.T_crit = 1e-12;
    CHECK(alpha_coefficient(cold, kGas.T) == doctest::Approx(0.257 / cold.p_crit).epsilon(1e-9));
}

TEST_CASE("compressibility factor evaluations") {
    const auto constant = CompressibilityModel::constant(kGas, 1.0);
    CHECK(constant.z(MassFraction(0.3), 5e6) == 1.0);

    const auto papay = CompressibilityModel::papay(kGas);
    CHECK(papay.z(MassFraction(0.7), 0.0) == doctest::Approx(1.0).epsilon(1e-14));

    // pure component evaluated at its own critical point
    GasPair at_crit = kGas;
    at_crit.T = kGas.ng.T_crit;
    const auto papay_crit = CompressibilityModel::papay(at_crit);
    const double expected = 1.0 - 3.52 * std::exp(-2.26) + 0.274 * std::exp(-1.878);
    CHECK(papay_crit.z(MassFraction(0.0), kGas.ng.p_crit) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.6746).epsilon(2e-4));

    const auto linear = CompressibilityModel::linear(kGas);
    for (double p = 1e5; p <= 70e5; p += 5e5) {
        CHECK(linear.z(MassFraction(0.0), p) ==
              doctest::Approx(1.0 + alpha_coefficient(kGas.ng, kGas.T) * p).epsilon(1e-14));
        CHECK(linear.z(MassFraction(1.0), p) ==
              doctest::Approx(1.0 + alpha_coefficient(kGas.h2, kGas.T) * p).epsilon(1e-14));
    }
}

TEST_CASE("non-positive Z is reported") {
    CustomZ bad;
    bad.z = [](double, double p) { return 1.0 - p / 1e6; };
    const auto model = CompressibilityModel::custom(kGas, bad, 1e4, 5e5);
    CHECK(model.z(MassFraction(0.0), 5e5) > 0.0);
    CHECK_THROWS_AS(model.z(MassFraction(0.0), 2e6), NonPositiveZ);
    CHECK_THROWS_AS(CompressibilityModel::custom(kGas, bad, 1e4, 2e7), NonPositiveZ);
}

TEST_CASE("dZ/dp matches central finite differences") {
    for (const auto& model : all_models()) {
        for (double eta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            for (double p : {2e5, 1e6, 3e6, 6e6, 9e6}) {
                const double h = 1e-5 * p;
                const double fd = (model.z(MassFraction(eta), p + h) - model.z(MassFraction(eta), p - h)) / (2 * h);
                const double an = model.z_dp(MassFraction(eta), p);
                // floor the scale where the derivative is essentially zero
                // (near-ideal blends); the difference quotient is then pure
                // rounding noise and a relative test is meaningless
                const double scale = std::max({std::abs(fd), std::abs(an), 1e-8});
                CHECK(std::abs(an - fd) / scale <= 1e-7);
            }
        }
    }
}

TEST_CASE("papay derivative at zero pressure") {
    const auto papay = CompressibilityModel::papay(kGas, CriticalMixing::mass);
    const double eta = 0.0;
    const double tr = kGas.T / kGas.ng.T_crit;
    const double expected = -3.52 * std::exp(-2.26 * tr) / kGas.ng.p_crit;
    CHECK(papay.z_dp(MassFraction(eta), 0.0) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("closed-form antiderivatives agree with adaptive quadrature") {
    for (const auto& model : all_models()) {
        for (double eta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const MassFraction mf(eta);
            const double gauge = model.antiderivative(mf, 1e5);
            for (int i = 0; i < 50; ++i) {
                const double p = 1e5 + (8e6 - 1e5) * i / 49.0;
                const double closed = model.antiderivative(mf, p) - gauge;
                const double quad = adaptive_simpson(
                    [&](double s) { return s / model.z(mf, s); }, 1e5, p, 1e-2, 1e-12);
                CHECK(std::abs(closed - quad) <= 1e-8 * std::max(1.0, std::abs(quad)));
            }
        }
    }
}

TEST_CASE("constant-model antiderivative is p^2/2k") {
    const auto model = CompressibilityModel::constant(kGas, 1.0);
    CHECK(model.antiderivative(MassFraction(0.4), 6e6) == doctest::Approx(1.8e13).epsilon(1e-14));
}

TEST_CASE("linear antiderivative differentiates back to p/Z") {
    const auto model = CompressibilityModel::linear(kGas);
    const MassFraction eta(0.35);
    const double p = 5e6;
    const double h = 1e-4 * p;
    const double fd = (model.antiderivative(eta, p + h) - model.antiderivative(eta, p - h)) / (2 * h);
    const double expected = p / model.z(eta, p);
    CHECK(fd == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("potential F and its derivative") {
    const auto constant = CompressibilityModel::constant(kGas, 1.0);
    // q = 0 removes the kinetic term
    CHECK(constant.potential(MassFraction(0.2), 0.0, 4e6) == doctest::Approx(0.5 * 4e6 * 4e6).epsilon(1e-14));
    for (const auto& model : all_models()) {
        CHECK(model.potential(MassFraction(0.6), 0.0, 3e6) ==
              doctest::Approx(model.antiderivative(MassFraction(0.6), 3e6)).epsilon(1e-14));
        CHECK(model.potential_dp(MassFraction(0.6), 0.0, 3e6) ==
              doctest::Approx(3e6 / model.z(MassFraction(0.6), 3e6)).epsilon(1e-12));
    }

    // dF/dp against central differences of F on a grid
    for (const auto& model : all_models()) {
        for (double eta : {0.0, 0.5, 1.0}) {
            for (double q : {0.0, 60.0, 140.0}) {
                for (double p : {8e5, 2e6, 5e6, 9e6}) {
                    const MassFraction mf(eta);
                    const double h = std::max(1e-5 * p, 30.0);
                    const double fd =
                        (model.potential(mf, q, p + h) - model.potential(mf, q, p - h)) / (2 * h);
                    const double an = model.potential_dp(mf, q, p);
                    CHECK(std::abs(an - fd) / std::max(1.0, std::abs(an)) <= 1e-7);
                }
            }
        }
    }
}

TEST_CASE("potential matches quadrature of its own derivative") {
    const auto model = CompressibilityModel::linear(kGas);
    const MassFraction eta(0.5);
    const double q = 100.0;
    const double gauge = 1e6;
    const double p = 5e6;
    const double direct = model.potential(eta, q, p) - model.potential(eta, q, gauge);
    const double integrated = adaptive_simpson(
        [&](double s) { return model.potential_dp(eta, q, s); }, gauge, p, 1e-2, 1e-12);
    CHECK(direct == doctest::Approx(integrated).epsilon(1e-8));
}

TEST_CASE("subsonic domain") {
    const auto constant = CompressibilityModel::constant(kGas, 1.0);
    CHECK(constant.subsonic(MassFraction(0.5), 0.0, 1e5));
    CHECK_FALSE(constant.subsonic(MassFraction(0.5), 1e9, 1e5));
    // Z = 1: subsonic iff |q| < p sqrt(M / RT)
    const MassFraction eta(0.3);
    const double p = 2e6;
    const double q_sonic = p / std::sqrt(rt_over_m(kGas, eta));
    CHECK(constant.subsonic(eta, 0.999 * q_sonic, p));
    CHECK_FALSE(constant.subsonic(eta, 1.001 * q_sonic, p));
}

TEST_CASE("dF/dp positive on the subsonic grid for every model kind") {
    int checked = 0;
    for (const auto& model : all_models()) {
        for (double eta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            for (double q : {0.0, 50.0, 150.0}) {
                for (int i = 0; i < 12; ++i) {
                    const double p = 1e5 + (9e6 - 1e5) * i / 11.0;
                    const MassFraction mf(eta);
                    if (!model.subsonic(mf, q, p)) continue;
                    CHECK(model.potential_dp(mf, q, p) > 0.0);
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 500);
}
