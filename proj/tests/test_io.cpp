#include <doctest.h>

#include <sstream>

#include "gasmix/errors.hpp"
#include "gasmix/io.hpp"

using namespace gasmix;

namespace {

int count_kind(const Network& net, EdgeKind kind) {
    int n = 0;
    for (const Edge& e : net.edges())
        if (e.kind == kind) ++n;
    return n;
}

} // namespace

TEST_CASE("gaslib11 fixture loads and classifies") {
    const NetworkCase c = load_network(std::string(GASMIX_DATA_DIR) + "/gaslib11.json");
    CHECK(c.net.nodes().size() == 11);
    CHECK(count_kind(c.net, EdgeKind::pipe) == 8);
    CHECK(count_kind(c.net, EdgeKind::compressor) == 2);
    CHECK(count_kind(c.net, EdgeKind::valve) == 1);
    CHECK(is_mixed_bc(c.net));
    CHECK(c.net.cyclomatic_number() == 1);
    CHECK(find_cycle(c.net).has_value());
    CHECK_FALSE(c.fixture_hash.empty());
}

TEST_CASE("cutting the gaslib11 cycle yields a 13-node tree") {
    const NetworkCase c = load_network(std::string(GASMIX_DATA_DIR) + "/gaslib11.json");
    const auto cycle = find_cycle(c.net);
    REQUIRE(cycle.has_value());
    const CutResult cut = cut_network(c.net, c.net.edge(cycle->edges.front()).id);
    CHECK(cut.net.nodes().size() == 13);
    CHECK(cut.net.cyclomatic_number() == 0);
    CHECK(cut.net.connected());
}

TEST_CASE("gaslib11 cycle decomposition has I_sol starting at zero") {
    const NetworkCase c = load_network(std::string(GASMIX_DATA_DIR) + "/gaslib11.json");
    const CompressibilityModel model = make_model(c.model, c.gas);
    const SteadyState st = solve_auto(c.net, model, c.momentum);
    REQUIRE(st.cut.has_value());
    CHECK(st.cut->lambda_lo == 0.0);
    CHECK(st.cut->lambda_hi > 0.0);
    CHECK(st.cut->lambda_star >= 0.0);
    CHECK(st.cut->lambda_star <= st.cut->lambda_hi);
    for (const auto& [id, beta] : st.cut->beta) CHECK(beta >= -1e-9);
    CHECK(st.residuals.cut_dp <= 1e-3);
    CHECK(st.residuals.cut_deta <= 1e-9);
}

TEST_CASE("missing zeta on a supply fails validation") {
    const char* doc = R"({
      "schema_version": 1,
      "nodes": [
        {"id": "a", "load": -5.0, "pressure_bar": 60.0},
        {"id": "b", "load": 5.0}
      ],
      "edges": [
        {"id": "ab", "from": "a", "to": "b", "kind": "pipe",
         "length_km": 10.0, "diameter_m": 0.5, "friction": 0.05}
      ]
    })";
    CHECK_THROWS_AS(parse_network(doc), ValidationError);
}

TEST_CASE("unknown model kind is a parse error") {
    const char* doc = R"({
      "schema_version": 1,
      "model": {"kind": "agadc92"},
      "nodes": [
        {"id": "a", "load": -5.0, "zeta": 0.1, "pressure_bar": 60.0},
        {"id": "b", "load": 5.0}
      ],
      "edges": [
        {"id": "ab", "from": "a", "to": "b", "kind": "pipe",
         "length_km": 10.0, "diameter_m": 0.5, "friction": 0.05}
      ]
    })";
    CHECK_THROWS_AS(parse_network(doc), ParseError);
    CHECK_THROWS_AS(parse_network("{ not json"), ParseError);
    CHECK_THROWS_AS(load_network("/does/not/exist.json"), IoError);
}

TEST_CASE("load -> serialize -> load is the identity") {
    const NetworkCase a = load_network(std::string(GASMIX_DATA_DIR) + "/gaslib11.json");
    const NetworkCase b = parse_network(network_to_json(a).dump());
    REQUIRE(a.net.nodes().size() == b.net.nodes().size());
    REQUIRE(a.net.edges().size() == b.net.edges().size());
    for (size_t i = 0; i < a.net.nodes().size(); ++i) {
        const Node& x = a.net.nodes()[i];
        const Node& y = b.net.nodes()[i];
        CHECK(x.id == y.id);
        CHECK(x.load == y.load);
        CHECK(x.zeta == y.zeta);
        CHECK(x.pressure == y.pressure);
    }
    for (size_t i = 0; i < a.net.edges().size(); ++i) {
        const Edge& x = a.net.edges()[i];
        const Edge& y = b.net.edges()[i];
        CHECK(x.id == y.id);
        CHECK(x.from == y.from);
        CHECK(x.to == y.to);
        CHECK(x.kind == y.kind);
        CHECK(x.pipe.length == y.pipe.length);
        CHECK(x.gamma == y.gamma);
    }
    CHECK(a.gas.ng.molar_mass == b.gas.ng.molar_mass);
    CHECK(a.model.kind == b.model.kind);
    CHECK(a.momentum == b.momentum);
}

TEST_CASE("rounding to significant figures") {
    CHECK(round_sig(40.8523456, 6) == doctest::Approx(40.8523).epsilon(1e-12));
    CHECK(round_sig(0.00123456789, 6) == doctest::Approx(0.00123457).epsilon(1e-9));
    CHECK(round_sig(-58.9012345, 6) == doctest::Approx(-58.9012).epsilon(1e-12));
    CHECK(round_sig(0.0, 6) == 0.0);
}

TEST_CASE("profile CSV has the documented shape") {
    const NetworkCase c = load_network(std::string(GASMIX_DATA_DIR) + "/single_pipe_50km.json");
    const CompressibilityModel model = make_model(c.model, c.gas);
    const SteadyState st = solve_auto(c.net, model, c.momentum);

    SUBCASE("two samples are exactly inlet and outlet") {
        const std::string csv = profile_csv(c, st, "main", 2);
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line);
        CHECK(line == "x_m,p_bar");
        std::getline(in, line);
        CHECK(line.substr(0, 2) == "0,");
        std::getline(in, line);
        CHECK(line.substr(0, 6) == "50000,");
        CHECK_FALSE(std::getline(in, line));
    }
    SUBCASE("x column is uniform") {
        const std::string csv = profile_csv(c, st, "main", 11);
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line);
        double prev_x = -1.0, prev_p = 1e99;
        int rows = 0;
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            const double x = std::stod(line.substr(0, comma));
            const double p = std::stod(line.substr(comma + 1));
            if (rows > 0) CHECK(x - prev_x == doctest::Approx(5000.0).epsilon(1e-12));
            CHECK(p < prev_p);
            prev_x = x;
            prev_p = p;
            ++rows;
        }
        CHECK(rows == 11);
    }
    SUBCASE("compressor edges are rejected") {
        CHECK_THROWS_AS(profile_csv(c, st, "nope", 5), UnknownEdge);
    }
}

TEST_CASE("result document fields") {
    const NetworkCase c = load_network(std::string(GASMIX_DATA_DIR) + "/single_pipe_50km.json");
    const CompressibilityModel model = make_model(c.model, c.gas);
    const SteadyState st = solve_auto(c.net, model, c.momentum);
    const nlohmann::json doc = result_to_json(c, st, c.model.kind);
    CHECK(doc.contains("provenance"));
    CHECK(doc["provenance"]["fixture_hash"] == c.fixture_hash);
    CHECK(doc["nodes"].size() == 2);
    CHECK(doc["edges"].size() == 1);
    CHECK(doc.contains("residuals"));
    CHECK(doc["supply_inflows"]["in"] == doctest::Approx(100.0));
    const double p = doc["nodes"][0]["pressure_bar"].get<double>();
    CHECK(p == round_sig(p, 6));
}
