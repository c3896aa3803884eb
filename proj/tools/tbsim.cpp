// tbsim: run registered experiments, list them, or run the invariant suite.
//
// Exit codes: 0 ok, 2 configuration error, 3 runtime error, 4 failed check.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tbsim/error.hpp"
#include "tbsim/experiments.hpp"
#include "tbsim/verify.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitVerify = 4;

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, std::optional<std::string> threads,
            std::optional<std::string> out)
{
    using namespace tbsim::experiments;
    Json doc;
    try {
        std::ifstream f(path);
        if (!f) {
            std::cerr << "ConfigError: cannot open " << path << "\n";
            return kExitConfig;
        }
        doc = Json::parse(f);
    } catch (const Json::parse_error& e) {
        std::cerr << "ConfigError: " << path << " is not valid JSON: " << e.what() << "\n";
        return kExitConfig;
    }
    if (doc.is_object()) {
        if (seed) {
            doc["seed"] = *seed;
        }
        if (threads) {
            if (*threads == "auto") {
                doc["threads"] = "auto";
            } else {
                try {
                    doc["threads"] = std::stoll(*threads);
                } catch (const std::exception&) {
                    std::cerr << "ConfigError: --threads takes an integer or \"auto\"\n";
                    return kExitConfig;
                }
            }
        }
        if (out) {
            doc["output_dir"] = *out;
        }
    }

    ExperimentConfig cfg;
    try {
        cfg = ExperimentConfig::from_json(doc);
    } catch (const tbsim::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const RunReport r = run(cfg);
        std::cout << r.report.at("results").dump(2) << "\n";
        std::cout << "wrote " << cfg.output_dir << "/report.json";
        for (const auto& t : r.tables) {
            std::cout << ", " << t.file;
        }
        std::cout << "\n";
    } catch (const tbsim::Error& e) {
        std::cerr << e.what() << "\n";
        return e.kind() == tbsim::ErrorKind::Config ? kExitConfig : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "RuntimeError: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}

int cmd_verify(bool full, const std::string& mutate)
{
    using namespace tbsim::verify;
    if (mutate == "deferral") {
        set_mutation(Mutation::Deferral);
    } else if (!mutate.empty()) {
        std::cerr << "ConfigError: unknown mutation '" << mutate << "'\n";
        return kExitConfig;
    }
    const auto results = run_checks(full ? Level::Full : Level::Quick, &std::cout);
    int failed = 0;
    double secs = 0.0;
    for (const auto& r : results) {
        failed += r.passed ? 0 : 1;
        secs += r.seconds;
    }
    std::cout << results.size() - failed << "/" << results.size() << " checks passed in " << secs << " s\n";
    if (failed > 0) {
        std::cout << "failed:";
        for (const auto& r : results) {
            if (!r.passed) {
                std::cout << " " << r.name;
            }
        }
        std::cout << "\n";
        return kExitVerify;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"two-boundary quantum dynamics simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tbsim::experiments::tool_version());

    auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> threads;
    std::optional<std::string> out;
    run->add_option("config", config_path, "flat JSON config")->required();
    run->add_option("--seed", seed, "override the master seed");
    run->add_option("--threads", threads, "worker threads or \"auto\"");
    run->add_option("--out", out, "output directory");

    auto* list = app.add_subcommand("list", "list experiments, parameters and output columns");

    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    bool full = false;
    std::string mutate;
    verify->add_flag("--full", full, "include the slow checks");
    verify->add_option("--mutate", mutate)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    if (*run) {
        return cmd_run(config_path, seed, threads, out);
    }
    if (*list) {
        tbsim::experiments::list(std::cout);
        return 0;
    }
    return cmd_verify(full, mutate);
}
