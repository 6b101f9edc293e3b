#ifndef GASMIX_EOS_HPP
#define GASMIX_EOS_HPP

#include <functional>
#include <string>
#include <variant>

#include "gasmix/gas.hpp"

namespace gasmix {

/// Basis for the convex combination of the component critical values in the
/// Papay model.
enum class CriticalMixing { mass, molar };

struct ConstantZ {
    double k = 1.0;
};

/// Z = 1 + (eta*alpha_H2 + (1-eta)*alpha_NG) * p with the AGA-style alpha
/// coefficients derived from the component critical points.
struct LinearZ {};

/// Papay's formula on mixture critical values.
struct PapayZ {
    CriticalMixing mixing = CriticalMixing::mass;
};

/// Caller-supplied evaluator. z is required; z_dp and antiderivative fall
/// back to central differences and adaptive quadrature when absent.
struct CustomZ {
    std::function<double(double eta, double p)> z;
    std::function<double(double eta, double p)> z_dp;
    std::function<double(double eta, double p)> antiderivative;
};

/// alpha_X = 0.257/p_c - 0.5333*T_c/(p_c*T), in 1/Pa.
double alpha_coefficient(const GasComponent& comp, double T);

/// A compressibility-factor model Z(eta, p) together with the derived
/// quantities the steady-state solver needs: dZ/dp, the antiderivative
/// A(eta,p) = int p/Z dp (gauge-fixed arbitrarily; only differences are
/// consumed), the pressure potential F, its p-derivative, and the subsonic
/// domain test. Immutable after construction; all evaluations are pure.
class CompressibilityModel {
public:
    static CompressibilityModel constant(GasPair pair, double k = 1.0);
    static CompressibilityModel linear(GasPair pair);
    static CompressibilityModel papay(GasPair pair, CriticalMixing mixing = CriticalMixing::mass);
    static CompressibilityModel custom(GasPair pair, CustomZ evaluator,
                                       double p_lo = 1.0e4, double p_hi = 2.0e7);

    const GasPair& pair() const { return pair_; }
    std::string kind_name() const;
    double pressure_lo() const { return p_lo_; }
    double pressure_hi() const { return p_hi_; }

    /// Z(eta, p). Throws NonPositiveZ when the result is <= 0.
    double z(MassFraction eta, double p) const;

    /// dZ/dp. Analytic for the named kinds, central finite difference for
    /// Custom without a supplied derivative.
    double z_dp(MassFraction eta, double p) const;

    /// A(eta, p) = int p/Z(eta,p) dp.
    double antiderivative(MassFraction eta, double p) const;

    /// F(eta, q, p) = A(eta,p) + (R T q^2 / M(eta)) * ln(Z/p).
    double potential(MassFraction eta, double q, double p) const;

    /// dF/dp = (p^2 - (RT/M) q^2 [Z - p dZ/dp]) / (p Z); positive iff the
    /// state is subsonic.
    double potential_dp(MassFraction eta, double q, double p) const;

    /// True iff p^2 - (RT/M(eta)) q^2 [Z - p*dZ/dp] > 0 (and Z > 0).
    bool subsonic(MassFraction eta, double q, double p) const;

private:
    CompressibilityModel(GasPair pair, std::variant<ConstantZ, LinearZ, PapayZ, CustomZ> kind,
                         double p_lo, double p_hi);

    double z_raw(double eta, double p) const; // may be <= 0, no throw
    void validate_range() const;

    GasPair pair_;
    std::variant<ConstantZ, LinearZ, PapayZ, CustomZ> kind_;
    double p_lo_ = 1.0e4;
    double p_hi_ = 2.0e7;
};

} // namespace gasmix

#endif
