#ifndef GASMIX_GAS_HPP
#define GASMIX_GAS_HPP

#include <string>

namespace gasmix {

/// Physical constants of one pure constituent. All values SI.
struct GasComponent {
    std::string name;
    double molar_mass = 0.0; ///< kg/mol
    double p_crit = 0.0;     ///< Pa
    double T_crit = 0.0;     ///< K
};

/// The two constituents of a blend plus the shared gas constant and
/// temperature. Constituent 1 is hydrogen, constituent 2 natural gas.
struct GasPair {
    GasComponent h2;
    GasComponent ng;
    double R = 8.3145;  ///< J/(mol K)
    double T = 283.15;  ///< K

    double rt() const { return R * T; }
};

/// Throws std::invalid_argument when a constant is non-positive.
void check(const GasComponent& c);
void check(const GasPair& pair);

/// Hydrogen mass fraction of the blend, validated to [0,1].
class MassFraction {
public:
    MassFraction() = default;
    explicit MassFraction(double eta);
    double value() const { return eta_; }

private:
    double eta_ = 0.0;
};

/// Blend parameters of the paper's GasLib-11 experiment. Natural gas is one
/// pseudo-component: 90/6/4 molar percent methane/ethane/propane collapsed to
/// a single molar mass of 1.80068e-2 kg/mol.
GasPair example_gas();

/// Molar mass of the blend, M1*M2 / (eta*M2 + (1-eta)*M1).
double molar_mass(const GasPair& pair, MassFraction eta);

/// Convenience: R*T / M(eta), the square of the isothermal sound speed scale.
double rt_over_m(const GasPair& pair, MassFraction eta);

/// Mass fraction -> molar fraction of constituent 1.
double mass_to_molar(const GasPair& pair, MassFraction eta);

/// Molar fraction -> mass fraction; inverse of mass_to_molar.
MassFraction molar_to_mass(const GasPair& pair, double eta_mol);

} // namespace gasmix

#endif
