// Batch front-end: scenario sweeps, phase-space verification, and config
// normalization. Exit codes: 0 all checks pass, 1 physics-identity or
// verification failure, 2 configuration error, 3 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbrown/config.hpp"
#include "qbrown/sweep.hpp"

namespace {

int resolve_threads(int cli_threads, const qbrown::RunConfig& cfg) {
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("QBROWN_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return cfg.threads;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fluctuation-induced decoherence, dissipation, diffusion, drag, and "
                 "Casimir-Polder coefficients for a polarizable particle near a planar medium"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string summary_path;
    int threads = 0;
    std::uint64_t seed_override = 0;
    bool seed_given = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "scenario configuration file")->required();
        cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
        cmd->add_option("--seed", seed_override, "override the config seed")
            ->each([&](const std::string&) { seed_given = true; });
    };

    auto* sweep_cmd = app.add_subcommand("sweep", "evaluate coefficients over the (z, T) grid");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--out", out_path, "CSV output path (default: stdout)");
    sweep_cmd->add_option("--summary", summary_path, "JSON summary path");

    auto* verify_cmd =
        app.add_subcommand("verify", "run the phase-space verification suites");
    add_common(verify_cmd);
    verify_cmd->add_option("--summary", summary_path, "JSON report path");

    auto* show_cmd = app.add_subcommand("show-config", "print the normalized configuration");
    add_common(show_cmd);

    CLI11_PARSE(app, argc, argv);

    qbrown::RunConfig cfg;
    try {
        cfg = qbrown::load_config(config_path);
    } catch (const qbrown::config_error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    cfg.threads = resolve_threads(threads, cfg);
    if (seed_given) cfg.seed = seed_override;

    if (show_cmd->parsed()) {
        std::cout << qbrown::canonical_config(cfg);
        return 0;
    }

    if (sweep_cmd->parsed()) {
        try {
            std::ostringstream csv;
            const qbrown::SweepSummary summary = qbrown::run_sweep(cfg, csv);
            if (out_path.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream out(out_path, std::ios::binary);
                if (!out) {
                    std::cerr << "cannot open output file: " << out_path << "\n";
                    return 2;
                }
                out << csv.str();
            }
            nlohmann::json j{
                {"points", summary.points},
                {"failed_points", summary.failed_points},
                {"max_fdr_resid", summary.max_fdr_resid},
                {"max_diffusion_resid", summary.max_diffusion_resid},
                {"max_drag_resid", summary.max_drag_resid},
                {"thresholds",
                 {{"fdr", qbrown::kFdrThreshold},
                  {"diffusion", qbrown::kDiffusionThreshold},
                  {"drag", qbrown::kDragThreshold}}},
                {"exit_code", summary.exit_code},
            };
            if (!summary_path.empty()) {
                std::ofstream js(summary_path, std::ios::binary);
                js << j.dump(2) << "\n";
            } else {
                std::cerr << j.dump(2) << "\n";
            }
            return summary.exit_code;
        } catch (const qbrown::config_error& e) {
            std::cerr << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "numerical failure: " << e.what() << "\n";
            return 3;
        }
    }

    if (verify_cmd->parsed()) {
        try {
            const auto checks = qbrown::run_verification(cfg);
            bool any_fail = false;
            nlohmann::json j = nlohmann::json::array();
            for (const auto& c : checks) {
                const std::string status =
                    !c.enabled ? "skipped" : (c.passed ? "pass" : "FAIL");
                std::cout << "[" << status << "] " << c.name;
                if (c.enabled)
                    std::cout << ": measured " << c.measured << " expected " << c.expected
                              << " tol " << c.tolerance << " (" << c.detail << ")";
                else if (!c.detail.empty())
                    std::cout << ": " << c.detail;
                std::cout << "\n";
                any_fail = any_fail || (c.enabled && !c.passed);
                j.push_back({{"name", c.name},
                             {"status", status},
                             {"measured", c.measured},
                             {"expected", c.expected},
                             {"tolerance", c.tolerance},
                             {"detail", c.detail}});
            }
            if (!summary_path.empty()) {
                std::ofstream js(summary_path, std::ios::binary);
                js << j.dump(2) << "\n";
            }
            return any_fail ? 1 : 0;
        } catch (const qbrown::config_error& e) {
            std::cerr << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "numerical failure: " << e.what() << "\n";
            return 3;
        }
    }
    return 2;
}
