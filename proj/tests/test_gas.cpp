#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "gasmix/gas.hpp"

using namespace gasmix;

TEST_CASE("molar mass of the blend") {
    const GasPair gas = example_gas();
    CHECK(molar_mass(gas, MassFraction(0.0)) == doctest::Approx(gas.ng.molar_mass).epsilon(1e-14));
    CHECK(molar_mass(gas, MassFraction(1.0)) == doctest::Approx(gas.h2.molar_mass).epsilon(1e-14));
    // eta = 1/2: harmonic combination 2 M1 M2 / (M1 + M2)
    const double m1 = gas.h2.molar_mass, m2 = gas.ng.molar_mass;
    const double expected = 2.0 * m1 * m2 / (m1 + m2);
    CHECK(molar_mass(gas, MassFraction(0.5)) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(3.6260e-3).epsilon(1e-4));
}

TEST_CASE("mass to molar fraction conversion") {
    const GasPair gas = example_gas();
    CHECK(mass_to_molar(gas, MassFraction(0.0)) == 0.0);
    CHECK(mass_to_molar(gas, MassFraction(1.0)) == 1.0);
    const double m1 = gas.h2.molar_mass, m2 = gas.ng.molar_mass;
    const double direct = 0.25 * m2 / (0.25 * m2 + 0.75 * m1);
    CHECK(mass_to_molar(gas, MassFraction(0.25)) == doctest::Approx(direct).epsilon(1e-14));
    CHECK(direct == doctest::Approx(0.7486).epsilon(2e-4));

    CHECK(molar_to_mass(gas, 0.0).value() == 0.0);
    CHECK(molar_to_mass(gas, 1.0).value() == 1.0);
    CHECK(molar_to_mass(gas, direct).value() == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("round trip, monotonicity and bounds over a 1001-point grid") {
    const GasPair gas = example_gas();
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double eta = i / 1000.0;
        const double mol = mass_to_molar(gas, MassFraction(eta));
        CHECK(std::abs(molar_to_mass(gas, mol).value() - eta) <= 1e-12);
        CHECK(mol > prev); // strictly increasing since M1 < M2
        prev = mol;
        const double m = molar_mass(gas, MassFraction(eta));
        CHECK(m >= gas.h2.molar_mass - 1e-18);
        CHECK(m <= gas.ng.molar_mass + 1e-18);
    }
}

TEST_CASE("mass fraction validation") {
    CHECK_THROWS_AS(MassFraction(-0.01), std::invalid_argument);
    CHECK_THROWS_AS(MassFraction(1.01), std::invalid_argument);
    CHECK(MassFraction(1.0 + 1e-14).value() == 1.0);
    CHECK(MassFraction(-1e-14).value() == 0.0);
}

TEST_CASE("gas pair validation") {
    GasPair gas = example_gas();
    gas.ng.molar_mass = 0.0;
    CHECK_THROWS_AS(check(gas), std::invalid_argument);
}
