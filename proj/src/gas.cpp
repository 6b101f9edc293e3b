#include "gasmix/gas.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gasmix {

void check(const GasComponent& c) {
    if (!(c.molar_mass > 0.0))
        throw std::invalid_argument("gas component '" + c.name + "': molar mass must be positive");
    if (!(c.p_crit > 0.0))
        throw std::invalid_argument("gas component '" + c.name + "': critical pressure must be positive");
    if (!(c.T_crit > 0.0))
        throw std::invalid_argument("gas component '" + c.name + "': critical temperature must be positive");
}

void check(const GasPair& pair) {
    check(pair.h2);
    check(pair.ng);
    if (!(pair.R > 0.0)) throw std::invalid_argument("gas constant R must be positive");
    if (!(pair.T > 0.0)) throw std::invalid_argument("gas temperature T must be positive");
}

MassFraction::MassFraction(double eta) : eta_(eta) {
    if (std::isnan(eta_)) throw std::invalid_argument("mass fraction is NaN");
    // allow harmless floating noise just outside [0,1]
    const double slack = 1e-12;
    if (eta_ < 0.0) {
        if (eta_ < -slack)
            throw std::invalid_argument("mass fraction " + std::to_string(eta_) + " outside [0,1]");
        eta_ = 0.0;
    } else if (eta_ > 1.0) {
        if (eta_ > 1.0 + slack)
            throw std::invalid_argument("mass fraction " + std::to_string(eta_) + " outside [0,1]");
        eta_ = 1.0;
    }
}

GasPair example_gas() {
    GasPair pair;
    pair.h2 = GasComponent{"H2", 2.016e-3, 13.15e5, 33.19};
    pair.ng = GasComponent{"NG", 1.80068e-2, 46.01e5, 204.62};
    pair.R = 8.3145;
    pair.T = 283.15;
    return pair;
}

double molar_mass(const GasPair& pair, MassFraction eta) {
    const double e = eta.value();
    const double m1 = pair.h2.molar_mass;
    const double m2 = pair.ng.molar_mass;
    return m1 * m2 / (e * m2 + (1.0 - e) * m1);
}

double rt_over_m(const GasPair& pair, MassFraction eta) {
    return pair.rt() / molar_mass(pair, eta);
}

double mass_to_molar(const GasPair& pair, MassFraction eta) {
    const double e = eta.value();
    const double m1 = pair.h2.molar_mass;
    const double m2 = pair.ng.molar_mass;
    return e * m2 / (e * m2 + (1.0 - e) * m1);
}

MassFraction molar_to_mass(const GasPair& pair, double eta_mol) {
    if (std::isnan(eta_mol) || eta_mol < -1e-12 || eta_mol > 1.0 + 1e-12)
        throw std::invalid_argument("molar fraction outside [0,1]");
    const double m1 = pair.h2.molar_mass;
    const double m2 = pair.ng.molar_mass;
    return MassFraction(eta_mol * m1 / (eta_mol * m1 + (1.0 - eta_mol) * m2));
}

} // namespace gasmix
