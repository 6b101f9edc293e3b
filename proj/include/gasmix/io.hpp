#ifndef GASMIX_IO_HPP
#define GASMIX_IO_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "gasmix/network.hpp"
#include "gasmix/solver.hpp"

namespace gasmix {

/// Named model selection as it appears in a network document.
struct ModelSpec {
    std::string kind = "constant"; ///< constant | linear | papay
    double k = 1.0;                ///< constant model factor
    CriticalMixing mixing = CriticalMixing::mass;
};

CompressibilityModel make_model(const ModelSpec& spec, const GasPair& pair);

/// A parsed network document: graph, gas data, model choice and momentum
/// mode. Document units are bar / km / m / K / kg/(m^2 s); everything is SI
/// after loading.
struct NetworkCase {
    Network net{{}, {}};
    GasPair gas;
    ModelSpec model;
    MomentumMode momentum = MomentumMode::full;
    std::string comment;
    std::string fixture_hash; ///< FNV-1a of the document bytes
};

NetworkCase parse_network(const std::string& text);
NetworkCase load_network(const std::string& path);

/// Serialization of a case back to the document schema (field-for-field
/// inverse of parse_network).
nlohmann::json network_to_json(const NetworkCase& c);

/// Result document of one solve: per-node and per-edge state, residuals,
/// cut block for cycle instances, and provenance.
nlohmann::json result_to_json(const NetworkCase& c, const SteadyState& state,
                              const std::string& model_name);

/// Round to the given number of significant figures (pressure reporting).
double round_sig(double value, int digits);

/// CSV pressure profile "x_m,p_bar" for one pipe edge of a solved state.
std::string profile_csv(const NetworkCase& c, const SteadyState& state,
                        const std::string& edge_id, int samples);

} // namespace gasmix

#endif
