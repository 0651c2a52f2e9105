// Command line front end: `run` executes a configured optimization and writes
// all artifacts; `audit` re-checks a saved checkpoint against its config.
#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "cga/driver.hpp"
#include "cga/errors.hpp"

namespace {

void apply_thread_env() {
    if (const char* env = std::getenv("CGA_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) Eigen::setNbThreads(n);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cgaopt: gradation-limited composition optimization for graded alloys"};
    app.require_subcommand(1);

    std::string run_config_path;
    std::string mode;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool deterministic = false;
    auto* run_cmd = app.add_subcommand("run", "optimize a configured problem");
    run_cmd->add_option("config", run_config_path, "problem config file")->required();
    run_cmd->add_option("--mode", mode, "neural or baseline")
        ->check(CLI::IsMember({"neural", "baseline"}));
    run_cmd->add_option("--seed", seed, "override the network seed");
    run_cmd->add_option("--out", out_dir, "override the output directory");
    run_cmd->add_flag("--deterministic", deterministic, "force deterministic single-thread mode");

    std::string audit_checkpoint;
    std::string audit_config_path;
    std::optional<std::string> audit_out;
    auto* audit_cmd = app.add_subcommand("audit", "spectrum and gradation audit of a checkpoint");
    audit_cmd->add_option("checkpoint", audit_checkpoint, "network checkpoint file")->required();
    audit_cmd->add_option("config", audit_config_path, "problem config file")->required();
    audit_cmd->add_option("--out", audit_out, "also write audit_report.txt to this directory");

    CLI11_PARSE(app, argc, argv);
    apply_thread_env();

    try {
        if (run_cmd->parsed()) {
            cga::ProblemConfig cfg = cga::parse_config(run_config_path);
            if (!mode.empty()) {
                cfg.mode = mode == "neural" ? cga::RunMode::Neural : cga::RunMode::Baseline;
            }
            if (seed) cfg.seed = *seed;
            if (out_dir) cfg.out_dir = *out_dir;
            if (deterministic) cfg.deterministic = true;
            if (cfg.deterministic) Eigen::setNbThreads(1);

            const cga::RunArtifacts artifacts = cga::execute_run(cfg);
            const auto& result = artifacts.result;
            std::cout << (result.neural ? "neural" : "baseline") << " run: J = " << result.J
                      << " (J/J0 = " << result.J / result.J0 << ") after " << result.iterations
                      << " iterations, "
                      << (result.converged     ? "converged"
                          : result.solver_failed ? "solver failure"
                                                 : "max iterations reached")
                      << "\nartifacts in " << artifacts.out_dir.string() << "\n";
            if (result.solver_failed) std::cerr << "failure: " << result.failure << "\n";
            return artifacts.exit_code;
        }
        cga::ProblemConfig cfg = cga::parse_config(audit_config_path);
        std::optional<std::filesystem::path> out;
        if (audit_out) out = *audit_out;
        return cga::execute_audit(audit_checkpoint, cfg, out);
    } catch (const cga::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return cga::kExitUsage;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return cga::kExitUsage;
    }
}
