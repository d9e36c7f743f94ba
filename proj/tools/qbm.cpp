#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qbm/errors.hpp"
#include "runner.hpp"

namespace fs = std::filesystem;
using namespace qbm;

namespace {

struct Flags {
    std::string config;
    std::string out;
    int jobs = 0;
    std::optional<std::uint64_t> seed;
    std::string propagator;
    bool inner_lambda = false;
    std::optional<double> tol_phys;
    std::optional<int> fock_dim;
    std::vector<std::string> sets;
};

nlohmann::json read_document(const Flags& f) {
    nlohmann::json doc = nlohmann::json::object();
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) throw ConfigError("cannot open config " + f.config);
        doc = nlohmann::json::parse(in, nullptr, false);
        if (doc.is_discarded()) throw ConfigError("config " + f.config + " is not valid JSON");
    }
    if (!f.out.empty()) doc["out"] = f.out;
    if (f.jobs > 0) doc["jobs"] = f.jobs;
    if (f.seed) doc["seed"] = *f.seed;
    if (!f.propagator.empty()) doc["propagator"] = f.propagator;
    if (f.inner_lambda) doc["inner_lambda"] = true;
    if (f.tol_phys) doc["tol_phys"] = *f.tol_phys;
    if (f.fock_dim) doc["fock_dim"] = *f.fock_dim;
    for (const auto& s : f.sets) cli::apply_override(doc, s);
    return doc;
}

int run(const std::string& name, const Flags& f) {
    const cli::Config cfg = cli::load_config(read_document(f));
    cli::Output o;
    if (name == "evolve") o = cli::cmd_evolve(cfg);
    else if (name == "region-map") o = cli::cmd_region_map(cfg);
    else if (name == "verify") o = cli::cmd_verify(cfg);
    else if (name == "entropy-curve") o = cli::cmd_entropy_curve(cfg);
    else if (name == "violation-demo") o = cli::cmd_violation_demo(cfg);
    else o = cli::cmd_sweep(cfg);
    fs::create_directories(cfg.out);
    for (const auto& [file, text] : o.files) {
        std::ofstream out(fs::path(cfg.out) / file, std::ios::binary);
        out << text;
        if (!out) throw ConfigError("cannot write " + (fs::path(cfg.out) / file).string());
    }
    std::cout << o.summary;
    return o.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum Brownian motion propagators, positivity diagnostics and oracles"};
    app.require_subcommand(1);
    Flags f;
    app.add_option("--config", f.config, "JSON configuration file");
    app.add_option("--out", f.out, "Output directory");
    app.add_option("--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", f.seed, "Sampling seed");
    app.add_option("--propagator", f.propagator, "exact|inner|outer|gao|patched")
        ->check(CLI::IsMember({"exact", "inner", "outer", "gao", "patched"}));
    app.add_flag("--inner-lambda", f.inner_lambda, "Use the inner-limit lambdas in the criteria");
    app.add_option("--tol-phys", f.tol_phys, "Physicality tolerance");
    app.add_option("--fock-dim", f.fock_dim, "Fock truncation dimension");
    app.add_option("--set", f.sets, "Dotted override, e.g. params.Gamma=0.05");
    app.fallthrough();

    std::string chosen;
    for (const char* name : {"evolve", "region-map", "verify", "entropy-curve", "violation-demo", "sweep"})
        app.add_subcommand(name)->callback([&chosen, name] { chosen = name; });
    app.add_subcommand("print-config", "Show the default configuration")->callback([&chosen] {
        chosen = "print-config";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (chosen == "print-config") {
            std::cout << cli::default_config().dump(2) << "\n";
            return 0;
        }
        return run(chosen, f);
    } catch (const Error& e) {
        std::cerr << "qbm: " << e.what() << "\n";
        return static_cast<int>(e.error_class());
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "qbm: config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "qbm: " << e.what() << "\n";
        return 3;
    }
}
