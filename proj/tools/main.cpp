// gasmix command line: steady states of hydrogen/natural-gas blends on
// pipeline networks. Subcommands: solve, profile, compare-models, cut-info,
// validate. Exit codes: 0 success, 2 validation/parse failure, 3 solver
// non-convergence, 4 I/O failure.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gasmix/errors.hpp"
#include "gasmix/io.hpp"
#include "gasmix/solver.hpp"

namespace {

using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

void write_output(const std::string& path, const std::string& payload) {
    if (path == "-") {
        std::cout << payload;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gasmix::IoError("cannot open '" + path + "' for writing");
    out << payload;
    if (!out) throw gasmix::IoError("failed while writing '" + path + "'");
}

gasmix::ModelSpec override_model(const gasmix::NetworkCase& c, const std::string& name) {
    if (name.empty()) return c.model;
    gasmix::ModelSpec spec = c.model;
    if (name == "custom")
        throw gasmix::ParseError("custom models are library-only; documents name "
                                 "constant, linear or papay");
    spec.kind = name;
    if (name != "constant" && name != "linear" && name != "papay" && name != "quadratic")
        throw gasmix::ParseError("unknown model kind '" + name + "'");
    return spec;
}

void print_residuals(const gasmix::SteadyState& st) {
    const gasmix::Residuals& r = st.residuals;
    std::printf("residuals:\n");
    std::printf("  %-18s %12.3e\n", "mass balance", r.mass_balance);
    std::printf("  %-18s %12.3e\n", "mixing", r.mixing);
    std::printf("  %-18s %12.3e  (rel %.3e)\n", "pipe potential", r.pressure_abs, r.pressure_rel);
    std::printf("  %-18s %12.3e\n", "compressor", r.compressor);
    if (st.cut) {
        std::printf("  %-18s %12.3e Pa\n", "cut pressure", r.cut_dp);
        std::printf("  %-18s %12.3e\n", "cut composition", r.cut_deta);
    }
    std::printf("  %-18s %12s\n", "subsonic", r.subsonic_ok ? "ok" : "VIOLATED");
}

int cmd_solve(const std::string& path, const std::string& model_name, const std::string& momentum,
              const std::string& out_path, const std::string& format) {
    gasmix::NetworkCase c = gasmix::load_network(path);
    c.model = override_model(c, model_name);
    if (momentum == "semilinear") c.momentum = gasmix::MomentumMode::semilinear;
    else if (momentum == "full") c.momentum = gasmix::MomentumMode::full;

    const gasmix::CompressibilityModel model = gasmix::make_model(c.model, c.gas);
    const gasmix::SteadyState st = gasmix::solve_auto(c.net, model, c.momentum);

    std::printf("%-10s %14s %10s\n", "node", "pressure [bar]", "eta");
    for (const gasmix::Node& n : c.net.nodes())
        std::printf("%-10s %14.6g %10.4f\n", n.id.c_str(),
                    st.node_pressure.at(n.id) / 1e5, st.node_eta.at(n.id));
    print_residuals(st);

    if (!out_path.empty()) {
        const json doc = gasmix::result_to_json(c, st, c.model.kind);
        if (format == "csv") {
            std::string csv = "node,pressure_bar,eta\n";
            char line[96];
            for (const gasmix::Node& n : c.net.nodes()) {
                std::snprintf(line, sizeof line, "%s,%.6g,%.6g\n", n.id.c_str(),
                              st.node_pressure.at(n.id) / 1e5, st.node_eta.at(n.id));
                csv += line;
            }
            write_output(out_path, csv);
        } else {
            write_output(out_path, doc.dump(2) + "\n");
        }
    }
    return 0;
}

int cmd_profile(const std::string& path, const std::string& edge, int samples,
                const std::string& out_path) {
    gasmix::NetworkCase c = gasmix::load_network(path);
    const gasmix::CompressibilityModel model = gasmix::make_model(c.model, c.gas);
    const gasmix::SteadyState st = gasmix::solve_auto(c.net, model, c.momentum);
    write_output(out_path, gasmix::profile_csv(c, st, edge, samples));
    return 0;
}

int cmd_compare(const std::string& path, std::vector<std::string> models,
                const std::string& out_path) {
    gasmix::NetworkCase c = gasmix::load_network(path);
    if (models.empty()) models = {"constant", "linear", "papay"};

    json all;
    all["results"] = json::object();
    std::map<std::string, gasmix::SteadyState> solved;
    std::map<std::string, std::string> failures;
    for (const std::string& name : models) {
        gasmix::NetworkCase variant = c;
        try {
            variant.model = override_model(c, name);
            const gasmix::CompressibilityModel model = gasmix::make_model(variant.model, c.gas);
            const gasmix::SteadyState st = gasmix::solve_auto(c.net, model, c.momentum);
            all["results"][name] = gasmix::result_to_json(variant, st, name);
            solved.emplace(name, st);
        } catch (const gasmix::Error& e) {
            failures[name] = e.what();
            all["results"][name] = {{"error", e.what()}};
        }
    }

    std::vector<std::string> outflows, supplies;
    for (const gasmix::Node& n : c.net.nodes()) {
        if (n.pressure || n.load < 0.0) supplies.push_back(n.id);
        else if (n.load > 0.0) outflows.push_back(n.id);
    }

    json summary;
    for (const std::string& name : models) {
        if (!solved.count(name)) continue;
        const gasmix::SteadyState& st = solved.at(name);
        json col;
        for (const std::string& id : outflows) {
            col["outflow_pressure_bar"][id] = gasmix::round_sig(st.node_pressure.at(id) / 1e5, 6);
            col["outflow_eta"][id] = st.node_eta.at(id);
        }
        for (const std::string& id : supplies)
            col["supply_inflow"][id] = -st.node_load.at(id);
        summary[name] = col;
    }
    all["summary"] = summary;

    auto row = [&](const char* label, auto getter) {
        std::printf("%-26s", label);
        for (const std::string& name : models) {
            if (!solved.count(name)) { std::printf(" %14s", "failed"); continue; }
            std::printf(" %14.6g", getter(solved.at(name)));
        }
        std::printf("\n");
    };
    std::printf("%-26s", "");
    for (const std::string& name : models) std::printf(" %14s", name.c_str());
    std::printf("\n");
    for (const std::string& id : outflows)
        row(("p [bar] at " + id).c_str(),
            [&](const gasmix::SteadyState& st) { return st.node_pressure.at(id) / 1e5; });
    for (const std::string& id : supplies)
        row(("q_in at " + id).c_str(),
            [&](const gasmix::SteadyState& st) { return -st.node_load.at(id); });
    for (const std::string& id : outflows)
        row(("eta_out at " + id).c_str(),
            [&](const gasmix::SteadyState& st) { return st.node_eta.at(id); });
    for (const auto& [name, what] : failures)
        std::fprintf(stderr, "model %s failed: %s\n", name.c_str(), what.c_str());

    if (!out_path.empty()) write_output(out_path, all.dump(2) + "\n");
    return failures.empty() ? 0 : kExitSolver;
}

int cmd_cut_info(const std::string& path, const std::string& format) {
    gasmix::NetworkCase c = gasmix::load_network(path);
    const auto cycle = gasmix::find_cycle(c.net);
    if (!cycle) {
        std::printf("no cycle\n");
        return 0;
    }
    // flows of the branches hanging off the cycle determine the cut data
    const gasmix::CompressibilityModel model = gasmix::make_model(c.model, c.gas);
    const gasmix::SteadyState st = gasmix::solve_auto(c.net, model, c.momentum);
    if (!st.cut) {
        std::printf("no cycle\n");
        return 0;
    }
    const gasmix::CutDecomposition& cut = *st.cut;
    if (format == "json") {
        json j{{"cut_edge", cut.cut_edge_id},
               {"flipped", cut.flipped},
               {"lambda_interval", {cut.lambda_lo, cut.lambda_hi}},
               {"lambda_star", cut.lambda_star},
               {"mu_star", cut.mu_star},
               {"bisection_iterations", cut.bisection_iterations}};
        j["beta"] = json::array();
        for (const auto& [id, value] : cut.beta) j["beta"].push_back({{"edge", id}, {"beta", value}});
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("cut edge:   %s%s\n", cut.cut_edge_id.c_str(), cut.flipped ? " (flipped)" : "");
        std::printf("I_sol:      [%.10g, %.10g]\n", cut.lambda_lo, cut.lambda_hi);
        std::printf("lambda*:    %.10g\n", cut.lambda_star);
        std::printf("mu*:        %.10g\n", cut.mu_star);
        std::printf("bisections: %d\n", cut.bisection_iterations);
        std::printf("beta:\n");
        for (const auto& [id, value] : cut.beta) std::printf("  %-12s %.10g\n", id.c_str(), value);
    }
    return 0;
}

int cmd_validate(const std::string& path) {
    try {
        gasmix::NetworkCase c = gasmix::load_network(path);
        const auto cycle = gasmix::find_cycle(c.net);
        std::printf("valid %s network: %zu nodes, %zu edges\n",
                    cycle ? "one-cycle" : "tree", c.net.nodes().size(), c.net.edges().size());
        return 0;
    } catch (const gasmix::ValidationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitValidation;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"steady-state solver for hydrogen/natural-gas blends on pipeline networks"};
    app.require_subcommand(1);

    std::string path, model_name, momentum, out_path = "", format = "json", edge;
    int samples = 101;
    std::vector<std::string> models;

    CLI::App* solve = app.add_subcommand("solve", "solve one network document");
    solve->add_option("network", path, "network document (JSON)")->required();
    solve->add_option("--model", model_name, "override the document's model: constant|linear|papay");
    solve->add_option("--momentum", momentum, "full|semilinear");
    solve->add_option("--out", out_path, "result document path ('-' for stdout)");
    solve->add_option("--format", format, "json|csv");

    CLI::App* profile = app.add_subcommand("profile", "pressure profile along one pipe");
    profile->add_option("network", path, "network document (JSON)")->required();
    profile->add_option("--edge", edge, "pipe edge id")->required();
    profile->add_option("--samples", samples, "number of profile samples");
    profile->add_option("--out", out_path, "CSV path ('-' for stdout)")->required();

    CLI::App* compare = app.add_subcommand("compare-models", "solve under several Z models");
    compare->add_option("network", path, "network document (JSON)")->required();
    compare->add_option("--models", models, "subset of constant linear papay");
    compare->add_option("--out", out_path, "combined result document path");

    CLI::App* cutinfo = app.add_subcommand("cut-info", "cycle decomposition report");
    cutinfo->add_option("network", path, "network document (JSON)")->required();
    cutinfo->add_option("--format", format, "text|json");

    CLI::App* validate_cmd = app.add_subcommand("validate", "check a network document");
    validate_cmd->add_option("network", path, "network document (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(path, model_name, momentum, out_path, format);
        if (profile->parsed()) return cmd_profile(path, edge, samples, out_path);
        if (compare->parsed()) return cmd_compare(path, models, out_path);
        if (cutinfo->parsed()) return cmd_cut_info(path, format == "json" ? "json" : "text");
        if (validate_cmd->parsed()) return cmd_validate(path);
    } catch (const gasmix::ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return kExitValidation;
    } catch (const gasmix::ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitValidation;
    } catch (const gasmix::UnknownEdge& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const gasmix::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kExitIo;
    } catch (const gasmix::Error& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSolver;
    }
    return 0;
}
