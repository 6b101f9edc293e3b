#include "gasmix/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gasmix/errors.hpp"

namespace gasmix {

using nlohmann::json;

namespace {

constexpr double kBar = 1.0e5; // Pa
constexpr double kKm = 1.0e3;  // m

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const json& member(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(where + ": missing field '" + key + "'");
    return *it;
}

double number(const json& j, const char* key, const std::string& where) {
    const json& v = member(j, key, where);
    if (!v.is_number()) throw ParseError(where + ": field '" + key + "' must be a number");
    return v.get<double>();
}

std::string text(const json& j, const char* key, const std::string& where) {
    const json& v = member(j, key, where);
    if (!v.is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

std::optional<double> opt_number(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw ParseError(where + ": field '" + key + "' must be a number");
    return it->get<double>();
}

GasComponent parse_component(const json& j, const std::string& where) {
    GasComponent c;
    c.name = j.value("name", std::string("gas"));
    c.molar_mass = number(j, "molar_mass", where);
    c.p_crit = number(j, "p_crit_bar", where) * kBar;
    c.T_crit = number(j, "T_crit", where);
    return c;
}

} // namespace

CompressibilityModel make_model(const ModelSpec& spec, const GasPair& pair) {
    if (spec.kind == "constant") return CompressibilityModel::constant(pair, spec.k);
    if (spec.kind == "linear") return CompressibilityModel::linear(pair);
    if (spec.kind == "papay" || spec.kind == "quadratic")
        return CompressibilityModel::papay(pair, spec.mixing);
    throw ParseError("unknown model kind '" + spec.kind + "'");
}

NetworkCase parse_network(const std::string& textdoc) {
    json j;
    try {
        j = json::parse(textdoc);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("document is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("document root must be an object");

    NetworkCase c;
    c.fixture_hash = fnv1a_hex(textdoc);
    c.comment = j.value("comment", "");
    const int version = j.value("schema_version", 1);
    if (version != 1) throw ParseError("unsupported schema_version " + std::to_string(version));

    if (j.contains("gas")) {
        const json& g = j["gas"];
        c.gas.R = number(g, "R", "gas");
        c.gas.T = number(g, "T", "gas");
        c.gas.h2 = parse_component(member(g, "h2", "gas"), "gas.h2");
        c.gas.ng = parse_component(member(g, "ng", "gas"), "gas.ng");
    } else {
        c.gas = example_gas();
    }
    try {
        check(c.gas);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("gas block: ") + e.what());
    }

    if (j.contains("model")) {
        const json& m = j["model"];
        c.model.kind = text(m, "kind", "model");
        if (auto k = opt_number(m, "k", "model")) c.model.k = *k;
        if (m.contains("critical_mixing")) {
            const std::string mixing = text(m, "critical_mixing", "model");
            if (mixing == "mass") c.model.mixing = CriticalMixing::mass;
            else if (mixing == "molar") c.model.mixing = CriticalMixing::molar;
            else throw ParseError("model: critical_mixing must be 'mass' or 'molar'");
        }
    }
    if (c.model.kind != "constant" && c.model.kind != "linear" && c.model.kind != "papay" &&
        c.model.kind != "quadratic")
        throw ParseError("unknown model kind '" + c.model.kind + "'");

    const std::string momentum = j.value("momentum_mode", "full");
    if (momentum == "full") c.momentum = MomentumMode::full;
    else if (momentum == "semilinear") c.momentum = MomentumMode::semilinear;
    else throw ParseError("momentum_mode must be 'full' or 'semilinear'");

    std::vector<Node> nodes;
    for (const json& nj : member(j, "nodes", "document")) {
        const std::string where = "node '" + nj.value("id", "?") + "'";
        Node n;
        n.id = text(nj, "id", "nodes[]");
        n.load = nj.value("load", 0.0);
        if (auto z = opt_number(nj, "zeta", where)) n.zeta = *z;
        if (auto p = opt_number(nj, "pressure_bar", where)) n.pressure = *p * kBar;
        nodes.push_back(std::move(n));
    }
    std::vector<Edge> edges;
    for (const json& ej : member(j, "edges", "document")) {
        const std::string where = "edge '" + ej.value("id", "?") + "'";
        Edge e;
        e.id = text(ej, "id", "edges[]");
        e.from = text(ej, "from", where);
        e.to = text(ej, "to", where);
        const std::string kind = text(ej, "kind", where);
        if (kind == "pipe") {
            e.kind = EdgeKind::pipe;
            e.pipe.length = number(ej, "length_km", where) * kKm;
            e.pipe.diameter = number(ej, "diameter_m", where);
            e.pipe.friction = number(ej, "friction", where);
        } else if (kind == "compressor") {
            e.kind = EdgeKind::compressor;
            e.gamma = number(ej, "gamma", where);
        } else if (kind == "valve") {
            e.kind = EdgeKind::valve;
        } else {
            throw ParseError(where + ": unknown edge kind '" + kind + "'");
        }
        edges.push_back(std::move(e));
    }

    c.net = Network(std::move(nodes), std::move(edges));
    const std::vector<std::string> problems = validate(c.net);
    if (!problems.empty()) {
        std::string msg = "network fails validation:";
        for (const std::string& p : problems) msg += "\n  - " + p;
        throw ValidationError(msg);
    }
    return c;
}

NetworkCase load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_network(buf.str());
}

json network_to_json(const NetworkCase& c) {
    json j;
    j["schema_version"] = 1;
    if (!c.comment.empty()) j["comment"] = c.comment;
    j["gas"] = {
        {"R", c.gas.R},
        {"T", c.gas.T},
        {"h2",
         {{"name", c.gas.h2.name},
          {"molar_mass", c.gas.h2.molar_mass},
          {"p_crit_bar", c.gas.h2.p_crit / kBar},
          {"T_crit", c.gas.h2.T_crit}}},
        {"ng",
         {{"name", c.gas.ng.name},
          {"molar_mass", c.gas.ng.molar_mass},
          {"p_crit_bar", c.gas.ng.p_crit / kBar},
          {"T_crit", c.gas.ng.T_crit}}},
    };
    json model{{"kind", c.model.kind}};
    if (c.model.kind == "constant") model["k"] = c.model.k;
    if (c.model.kind == "papay" || c.model.kind == "quadratic")
        model["critical_mixing"] = c.model.mixing == CriticalMixing::mass ? "mass" : "molar";
    j["model"] = model;
    j["momentum_mode"] = c.momentum == MomentumMode::full ? "full" : "semilinear";

    j["nodes"] = json::array();
    for (const Node& n : c.net.nodes()) {
        json nj{{"id", n.id}, {"load", n.load}};
        if (n.zeta) nj["zeta"] = *n.zeta;
        if (n.pressure) nj["pressure_bar"] = *n.pressure / kBar;
        j["nodes"].push_back(std::move(nj));
    }
    j["edges"] = json::array();
    for (const Edge& e : c.net.edges()) {
        json ej{{"id", e.id}, {"from", e.from}, {"to", e.to}};
        switch (e.kind) {
            case EdgeKind::pipe:
                ej["kind"] = "pipe";
                ej["length_km"] = e.pipe.length / kKm;
                ej["diameter_m"] = e.pipe.diameter;
                ej["friction"] = e.pipe.friction;
                break;
            case EdgeKind::compressor:
                ej["kind"] = "compressor";
                ej["gamma"] = e.gamma;
                break;
            case EdgeKind::valve:
                ej["kind"] = "valve";
                break;
        }
        j["edges"].push_back(std::move(ej));
    }
    return j;
}

double round_sig(double value, int digits) {
    if (value == 0.0 || !std::isfinite(value)) return value;
    const double mag = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::abs(value)))));
    return std::round(value * mag) / mag;
}

json result_to_json(const NetworkCase& c, const SteadyState& state,
                    const std::string& model_name) {
    json j;
    j["provenance"] = {{"model", model_name},
                       {"momentum_mode", c.momentum == MomentumMode::full ? "full" : "semilinear"},
                       {"fixture_hash", c.fixture_hash}};
    j["nodes"] = json::array();
    for (const Node& n : c.net.nodes()) {
        j["nodes"].push_back({{"id", n.id},
                              {"pressure_bar", round_sig(state.node_pressure.at(n.id) / kBar, 6)},
                              {"eta", state.node_eta.at(n.id)}});
    }
    j["edges"] = json::array();
    for (const Edge& e : c.net.edges()) {
        j["edges"].push_back({{"id", e.id},
                              {"q", state.edge_flow.at(e.id)},
                              {"eta", state.edge_eta.at(e.id)}});
    }
    json inflows = json::object();
    for (const Node& n : c.net.nodes()) {
        auto it = state.node_load.find(n.id);
        const double load = it != state.node_load.end() ? it->second : n.load;
        if (load < 0.0) inflows[n.id] = -load;
    }
    j["supply_inflows"] = inflows;
    const Residuals& r = state.residuals;
    j["residuals"] = {{"mass_balance", r.mass_balance},
                      {"mixing", r.mixing},
                      {"pressure_abs", r.pressure_abs},
                      {"pressure_rel", r.pressure_rel},
                      {"compressor", r.compressor},
                      {"subsonic_ok", r.subsonic_ok}};
    if (state.cut) {
        const CutDecomposition& cut = *state.cut;
        json beta = json::array();
        for (const auto& [id, value] : cut.beta) beta.push_back({{"edge", id}, {"beta", value}});
        j["cut"] = {{"cut_edge", cut.cut_edge_id},
                    {"flipped", cut.flipped},
                    {"beta", beta},
                    {"lambda_interval", {cut.lambda_lo, cut.lambda_hi}},
                    {"lambda_star", cut.lambda_star},
                    {"mu_star", cut.mu_star},
                    {"bisection_iterations", cut.bisection_iterations}};
        j["residuals"]["cut_dp"] = r.cut_dp;
        j["residuals"]["cut_deta"] = r.cut_deta;
    }
    return j;
}

std::string profile_csv(const NetworkCase& c, const SteadyState& state, const std::string& edge_id,
                        int samples) {
    const int idx = c.net.edge_index(edge_id);
    const Edge& e = c.net.edge(idx);
    if (e.kind == EdgeKind::compressor)
        throw UnknownEdge("edge '" + edge_id + "' is a compressor, profiles require a pipe");
    const CompressibilityModel model = make_model(c.model, c.gas);
    const EdgeState es{state.edge_flow.at(edge_id), MassFraction(state.edge_eta.at(edge_id))};
    const double p_start = state.node_pressure.at(e.from);
    const auto points = pressure_profile(model, e.pipe, es, p_start, samples, c.momentum);
    std::string out = "x_m,p_bar\n";
    char line[64];
    for (const ProfilePoint& pt : points) {
        std::snprintf(line, sizeof line, "%.10g,%.6g\n", pt.x, pt.p / kBar);
        out += line;
    }
    return out;
}

} // namespace gasmix
