#include "cga/driver.hpp"

#include <iostream>
#include <sstream>

#include "cga/errors.hpp"
#include "cga/io.hpp"
#include "cga/spectrum.hpp"

namespace cga {

namespace {

using Entries = std::vector<std::pair<std::string, std::string>>;

void append_spectrum_entries(Entries& entries, const SpectrumReport& report, double bx,
                             double by) {
    entries.emplace_back("spectrum.samples_x", std::to_string(report.nx));
    entries.emplace_back("spectrum.samples_y", std::to_string(report.ny));
    entries.emplace_back("spectrum.freq_resolution_x", io::format_double(1.0 / report.lx));
    entries.emplace_back("spectrum.freq_resolution_y", io::format_double(1.0 / report.ly));
    entries.emplace_back("spectrum.band_x", io::format_double(bx));
    entries.emplace_back("spectrum.band_y", io::format_double(by));
    for (std::size_t c = 0; c < report.magnitude.size(); ++c) {
        const std::string prefix = "spectrum.component_" + std::to_string(c);
        const int comp = static_cast<int>(c);
        entries.emplace_back(prefix + ".ac_energy", io::format_double(report.ac_energy(comp)));
        entries.emplace_back(prefix + ".out_of_band_ratio_x",
                             io::format_double(band_energy_ratio(report, comp, bx, by, BandAxis::X)));
        entries.emplace_back(prefix + ".out_of_band_ratio_y",
                             io::format_double(band_energy_ratio(report, comp, bx, by, BandAxis::Y)));
        entries.emplace_back(
            prefix + ".out_of_band_ratio",
            io::format_double(band_energy_ratio(report, comp, bx, by, BandAxis::Joint)));
    }
    entries.emplace_back("spectrum.out_of_band_ratio_worst",
                         io::format_double(band_energy_ratio(report, bx, by, BandAxis::Joint)));
}

void append_audit_entries(Entries& entries, const GradationAudit& audit) {
    entries.emplace_back("audit.bandwidth_x", io::format_double(audit.bandwidth_x));
    entries.emplace_back("audit.bandwidth_y", io::format_double(audit.bandwidth_y));
    entries.emplace_back("audit.slack", io::format_double(audit.slack));
    entries.emplace_back("audit.samples_x", std::to_string(audit.samples_x));
    entries.emplace_back("audit.samples_y", std::to_string(audit.samples_y));
    for (std::size_t c = 0; c < audit.components.size(); ++c) {
        const auto& ca = audit.components[c];
        const std::string prefix = "audit.component_" + std::to_string(c);
        entries.emplace_back(prefix + ".max_abs_rho", io::format_double(ca.max_rho));
        entries.emplace_back(prefix + ".max_grad_x", io::format_double(ca.max_grad_x));
        entries.emplace_back(prefix + ".max_grad_y", io::format_double(ca.max_grad_y));
        entries.emplace_back(prefix + ".argmax_grad_x",
                             io::format_double(ca.argmax_grad_x(0)) + " " +
                                 io::format_double(ca.argmax_grad_x(1)));
        entries.emplace_back(prefix + ".argmax_grad_y",
                             io::format_double(ca.argmax_grad_y(0)) + " " +
                                 io::format_double(ca.argmax_grad_y(1)));
        entries.emplace_back(prefix + ".bound_x", io::format_double(ca.bound_x));
        entries.emplace_back(prefix + ".bound_y", io::format_double(ca.bound_y));
        entries.emplace_back(prefix + ".pass", ca.pass_x && ca.pass_y ? "1" : "0");
    }
    entries.emplace_back("audit.pass", audit.pass ? "1" : "0");
}

}  // namespace

RunArtifacts execute_run(const ProblemConfig& cfg) {
    const ThermoElasticProblem problem = make_problem(cfg);
    const auto material = make_material(cfg);
    const RunConfig run = make_run_config(cfg);

    RunArtifacts artifacts;
    artifacts.out_dir = cfg.out_dir;
    std::filesystem::create_directories(cfg.out_dir);

    OptimizationResult result;
    if (cfg.mode == RunMode::Neural) {
        result = run_optimization(problem, make_net_config(cfg, material->components()), *material,
                                  run);
    } else {
        result = run_baseline_element(problem, *material, run);
    }

    io::write_composition_csv(cfg.out_dir / "composition.csv", result.field);
    io::write_convergence_csv(cfg.out_dir / "convergence.csv", result.history);
    io::write_nodal_fields_csv(cfg.out_dir / "fields_nodal.csv", problem.grid,
                               result.final_thermal.T, result.final_structural.u);
    io::write_element_fields_csv(cfg.out_dir / "fields_element.csv", problem.grid,
                                 result.final_compliance_density);
    for (long c = 0; c < result.field.cols(); ++c) {
        io::write_pgm(cfg.out_dir / ("component_" + std::to_string(c) + ".pgm"),
                      result.field.col(c), problem.grid.nx, problem.grid.ny);
    }
    if (result.neural) {
        save_checkpoint(result.params, cfg.out_dir / "checkpoint.mfn");
    }

    Entries entries;
    entries.emplace_back("run.mode", cfg.mode == RunMode::Neural ? "neural" : "baseline");
    entries.emplace_back("run.iterations", std::to_string(result.iterations));
    entries.emplace_back("run.converged", result.converged ? "1" : "0");
    entries.emplace_back("run.solver_failed", result.solver_failed ? "1" : "0");
    entries.emplace_back("run.J", io::format_double(result.J));
    entries.emplace_back("run.J0", io::format_double(result.J0));
    if (!result.history.empty()) {
        const auto& last = result.history.back();
        entries.emplace_back("run.g_m", io::format_double(last.g_m));
        entries.emplace_back("run.g_u", io::format_double(last.g_u));
        entries.emplace_back("run.g_l", io::format_double(last.g_l));
        entries.emplace_back("run.g_p", io::format_double(last.g_p));
        entries.emplace_back("run.max_partition_dev",
                             io::format_double(last.max_partition_deviation));
        entries.emplace_back("run.wall_time_s", io::format_double(last.wall_time_s));
    }

    const SpectrumReport spectrum =
        dft2(result.field, problem.grid.nx, problem.grid.ny, problem.grid.lx, problem.grid.ly);
    append_spectrum_entries(entries, spectrum, cfg.bandwidth_x, cfg.bandwidth_y);
    artifacts.band_ratio = band_energy_ratio(spectrum, cfg.bandwidth_x, cfg.bandwidth_y);
    if (result.neural) {
        append_audit_entries(entries, bernstein_audit(result.params, problem.grid));
    }
    io::write_report(cfg.out_dir / "report.txt", entries);

    if (result.solver_failed) {
        artifacts.exit_code = kExitSolverFailure;
    } else if (!result.converged) {
        artifacts.exit_code = kExitMaxIter;
    } else {
        artifacts.exit_code = kExitConverged;
    }
    artifacts.result = std::move(result);
    return artifacts;
}

int execute_audit(const std::filesystem::path& checkpoint_path, const ProblemConfig& cfg,
                  const std::optional<std::filesystem::path>& out_dir) {
    const MfnParams params = load_checkpoint(checkpoint_path);
    const auto material = make_material(cfg);
    const MfnConfig expected = make_net_config(cfg, material->components());
    std::ostringstream mismatch;
    if (params.config.n_layers != expected.n_layers) {
        mismatch << "layers " << params.config.n_layers << " vs " << expected.n_layers << "; ";
    }
    if (params.config.width != expected.width) {
        mismatch << "width " << params.config.width << " vs " << expected.width << "; ";
    }
    if (params.config.outputs != expected.outputs) {
        mismatch << "components " << params.config.outputs << " vs " << expected.outputs << "; ";
    }
    if (params.config.bandwidth_x != expected.bandwidth_x ||
        params.config.bandwidth_y != expected.bandwidth_y) {
        mismatch << "bandwidth (" << params.config.bandwidth_x << "," << params.config.bandwidth_y
                 << ") vs (" << expected.bandwidth_x << "," << expected.bandwidth_y << "); ";
    }
    if (!mismatch.str().empty()) {
        throw ConfigError("checkpoint does not match config: " + mismatch.str());
    }

    const Grid2D grid = make_grid(cfg);
    const CompositionField field = forward(params, element_centers(grid));
    const SpectrumReport spectrum = dft2(field, grid.nx, grid.ny, grid.lx, grid.ly);
    const GradationAudit audit = bernstein_audit(params, grid);

    Entries entries;
    entries.emplace_back("audit.checkpoint", checkpoint_path.string());
    append_spectrum_entries(entries, spectrum, cfg.bandwidth_x, cfg.bandwidth_y);
    append_audit_entries(entries, audit);
    for (const auto& [key, value] : entries) std::cout << key << " = " << value << "\n";
    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        io::write_report(*out_dir / "audit_report.txt", entries);
    }
    return audit.pass ? kExitConverged : kExitMaxIter;
}

}  // namespace cga
