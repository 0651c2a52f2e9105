#pragma once

#include <filesystem>
#include <optional>

#include "cga/config.hpp"
#include "cga/optimizer.hpp"

namespace cga {

// Process exit codes for the run command.
inline constexpr int kExitConverged = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitMaxIter = 2;
inline constexpr int kExitSolverFailure = 3;

struct RunArtifacts {
    OptimizationResult result;
    std::filesystem::path out_dir;
    int exit_code = kExitConverged;
    double band_ratio = 0.0;  // joint out-of-band AC energy fraction, worst component
};

// Runs the configured optimization and writes composition/convergence CSVs,
// per-component images, nodal/element field dumps, the spectrum + gradation
// report, and (neural mode) the network checkpoint.
RunArtifacts execute_run(const ProblemConfig& cfg);

// Recomputes the spectrum report and gradation audit for a saved checkpoint
// without re-optimizing. Returns kExitConverged on an audit pass.
int execute_audit(const std::filesystem::path& checkpoint_path, const ProblemConfig& cfg,
                  const std::optional<std::filesystem::path>& out_dir);

}  // namespace cga
