#include "gasmix/eos.hpp"

#include <cmath>
#include <stdexcept>

#include "gasmix/errors.hpp"
#include "gasmix/quadrature.hpp"

namespace gasmix {

namespace {

constexpr double kGaugePressure = 1.0e5; // Pa, quadrature gauge point

struct Quadratic {
    double a = 0.0; // Z = 1 + a p + b p^2
    double b = 0.0;
};

double papay_weight(const GasPair& pair, double eta, CriticalMixing mixing) {
    if (mixing == CriticalMixing::molar)
        return mass_to_molar(pair, MassFraction(eta));
    return eta;
}

Quadratic papay_coefficients(const GasPair& pair, double eta, CriticalMixing mixing) {
    const double w = papay_weight(pair, eta, mixing);
    const double t_c = w * pair.h2.T_crit + (1.0 - w) * pair.ng.T_crit;
    const double p_c = w * pair.h2.p_crit + (1.0 - w) * pair.ng.p_crit;
    const double tr = pair.T / t_c;
    Quadratic q;
    q.a = -3.52 * std::exp(-2.26 * tr) / p_c;
    q.b = 0.274 * std::exp(-1.878 * tr) / (p_c * p_c);
    return q;
}

double linear_alpha(const GasPair& pair, double eta) {
    return eta * alpha_coefficient(pair.h2, pair.T) + (1.0 - eta) * alpha_coefficient(pair.ng, pair.T);
}

/// Antiderivative of p / (1 + a p + b p^2), up to a constant. p_scale is the
/// upper end of the model's validity range; it decides once per (a, b)
/// whether the closed form is well conditioned, so that all evaluations of
/// one model share a single gauge.
double quadratic_antiderivative(double a, double b, double p, double z_value, double p_scale) {
    // near-ideal gas: ln(Z)/(2b) cancels catastrophically, integrate the
    // geometric series of 1/(1+u), u = a p + b p^2, term by term instead
    // (relative truncation error below (|a|p + bp^2)^7 over the whole range)
    if (std::abs(a) * p_scale + std::abs(b) * p_scale * p_scale < 0.05) {
        static const double binom[7][7] = {{1},
                                           {1, 1},
                                           {1, 2, 1},
                                           {1, 3, 3, 1},
                                           {1, 4, 6, 4, 1},
                                           {1, 5, 10, 10, 5, 1},
                                           {1, 6, 15, 20, 15, 6, 1}};
        double acc = 0.0;
        double sign = 1.0;
        for (int n = 0; n <= 6; ++n, sign = -sign) {
            for (int k = 0; k <= n; ++k) {
                const int power = n + 2 + k;
                acc += sign * binom[n][k] * std::pow(a, n - k) * std::pow(b, k) *
                       std::pow(p, power) / power;
            }
        }
        return acc;
    }
    if (std::abs(b) * p_scale * p_scale < 1e-9 * std::abs(a) * p_scale) {
        // effectively linear
        return p / a - std::log(z_value) / (a * a);
    }
    const double disc = 4.0 * b - a * a;
    const double scale = 4.0 * std::abs(b) + a * a;
    double j; // int dp / (b p^2 + a p + 1)
    if (disc > 1e-12 * scale) {
        const double s = std::sqrt(disc);
        j = 2.0 / s * std::atan((2.0 * b * p + a) / s);
    } else if (disc < -1e-12 * scale) {
        const double s = std::sqrt(-disc);
        const double u = 2.0 * b * p + a;
        j = 1.0 / s * std::log(std::abs((u - s) / (u + s)));
    } else {
        j = -2.0 / (2.0 * b * p + a);
    }
    return std::log(std::abs(z_value)) / (2.0 * b) - a / (2.0 * b) * j;
}

} // namespace

double alpha_coefficient(const GasComponent& comp, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("temperature must be positive");
    return 0.257 / comp.p_crit - 0.5333 * comp.T_crit / (comp.p_crit * T);
}

CompressibilityModel::CompressibilityModel(GasPair pair,
                                           std::variant<ConstantZ, LinearZ, PapayZ, CustomZ> kind,
                                           double p_lo, double p_hi)
    : pair_(std::move(pair)), kind_(std::move(kind)), p_lo_(p_lo), p_hi_(p_hi) {
    check(pair_);
    if (!(p_lo_ > 0.0) || !(p_hi_ > p_lo_))
        throw std::invalid_argument("invalid pressure validity range");
    if (const auto* c = std::get_if<ConstantZ>(&kind_)) {
        if (!(c->k > 0.0)) throw std::invalid_argument("constant compressibility factor must be positive");
    }
    if (const auto* c = std::get_if<CustomZ>(&kind_)) {
        if (!c->z) throw std::invalid_argument("custom model requires a Z evaluator");
    }
    validate_range();
}

CompressibilityModel CompressibilityModel::constant(GasPair pair, double k) {
    return CompressibilityModel(std::move(pair), ConstantZ{k}, 1.0e4, 2.0e7);
}

CompressibilityModel CompressibilityModel::linear(GasPair pair) {
    return CompressibilityModel(std::move(pair), LinearZ{}, 1.0e4, 2.0e7);
}

CompressibilityModel CompressibilityModel::papay(GasPair pair, CriticalMixing mixing) {
    return CompressibilityModel(std::move(pair), PapayZ{mixing}, 1.0e4, 2.0e7);
}

CompressibilityModel CompressibilityModel::custom(GasPair pair, CustomZ evaluator,
                                                  double p_lo, double p_hi) {
    return CompressibilityModel(std::move(pair), std::move(evaluator), p_lo, p_hi);
}

std::string CompressibilityModel::kind_name() const {
    switch (kind_.index()) {
        case 0: return "constant";
        case 1: return "linear";
        case 2: return "papay";
        default: return "custom";
    }
}

void CompressibilityModel::validate_range() const {
    const double etas[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    const int n = 33;
    const double ratio = std::pow(p_hi_ / p_lo_, 1.0 / (n - 1));
    for (double eta : etas) {
        double p = p_lo_;
        for (int i = 0; i < n; ++i, p *= ratio) {
            if (!(z_raw(eta, std::min(p, p_hi_)) > 0.0))
                throw NonPositiveZ("compressibility factor non-positive inside declared range near p=" +
                                   std::to_string(p) + " Pa, eta=" + std::to_string(eta));
        }
    }
}

double CompressibilityModel::z_raw(double eta, double p) const {
    switch (kind_.index()) {
        case 0:
            return std::get<ConstantZ>(kind_).k;
        case 1:
            return 1.0 + linear_alpha(pair_, eta) * p;
        case 2: {
            const Quadratic q = papay_coefficients(pair_, eta, std::get<PapayZ>(kind_).mixing);
            return 1.0 + q.a * p + q.b * p * p;
        }
        default:
            return std::get<CustomZ>(kind_).z(eta, p);
    }
}

double CompressibilityModel::z(MassFraction eta, double p) const {
    if (!(p >= 0.0)) throw std::invalid_argument("pressure must be non-negative");
    const double value = z_raw(eta.value(), p);
    if (!(value > 0.0))
        throw NonPositiveZ("Z(" + std::to_string(eta.value()) + ", " + std::to_string(p) +
                           " Pa) = " + std::to_string(value) + " is outside the model validity range");
    return value;
}

double CompressibilityModel::z_dp(MassFraction eta, double p) const {
    const double e = eta.value();
    switch (kind_.index()) {
        case 0:
            return 0.0;
        case 1:
            return linear_alpha(pair_, e);
        case 2: {
            const Quadratic q = papay_coefficients(pair_, e, std::get<PapayZ>(kind_).mixing);
            return q.a + 2.0 * q.b * p;
        }
        default: {
            const auto& c = std::get<CustomZ>(kind_);
            if (c.z_dp) return c.z_dp(e, p);
            const double h = 1e-6 * std::max(p, 1.0e5);
            return (c.z(e, p + h) - c.z(e, p - h)) / (2.0 * h);
        }
    }
}

double CompressibilityModel::antiderivative(MassFraction eta, double p) const {
    const double e = eta.value();
    switch (kind_.index()) {
        case 0: {
            const double k = std::get<ConstantZ>(kind_).k;
            return 0.5 * p * p / k;
        }
        case 1: {
            const double alpha = linear_alpha(pair_, e);
            if (std::abs(alpha) < 1e-300) return 0.5 * p * p;
            return p / alpha - std::log(z(eta, p)) / (alpha * alpha);
        }
        case 2: {
            const Quadratic q = papay_coefficients(pair_, e, std::get<PapayZ>(kind_).mixing);
            return quadratic_antiderivative(q.a, q.b, p, z(eta, p), p_hi_);
        }
        default: {
            const auto& c = std::get<CustomZ>(kind_);
            if (c.antiderivative) return c.antiderivative(e, p);
            const double lo = std::min(kGaugePressure, p);
            const double hi = std::max(kGaugePressure, p);
            const double sign = p >= kGaugePressure ? 1.0 : -1.0;
            auto integrand = [&](double s) { return s / z(eta, s); };
            return sign * adaptive_simpson(integrand, lo, hi, 1.0, 1e-10);
        }
    }
}

double CompressibilityModel::potential(MassFraction eta, double q, double p) const {
    if (!(p > 0.0)) throw std::invalid_argument("potential requires positive pressure");
    const double zv = z(eta, p);
    return antiderivative(eta, p) + rt_over_m(pair_, eta) * q * q * std::log(zv / p);
}

double CompressibilityModel::potential_dp(MassFraction eta, double q, double p) const {
    const double zv = z(eta, p);
    const double dz = z_dp(eta, p);
    const double rtm = rt_over_m(pair_, eta);
    return (p * p - rtm * q * q * (zv - p * dz)) / (p * zv);
}

bool CompressibilityModel::subsonic(MassFraction eta, double q, double p) const {
    if (!(p > 0.0)) return false;
    const double zv = z_raw(eta.value(), p);
    if (!(zv > 0.0)) return false;
    const double dz = z_dp(eta, p);
    const double rtm = rt_over_m(pair_, eta);
    return p * p - rtm * q * q * (zv - p * dz) > 0.0;
}

} // namespace gasmix
