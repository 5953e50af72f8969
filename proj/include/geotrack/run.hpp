#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geotrack/integrator.hpp"
#include "geotrack/scenarios.hpp"

namespace geotrack {

/// Command-level options layered on top of a scenario configuration.
struct RunOptions {
    std::string out_dir = ".";
    std::optional<double> dt;
    std::optional<double> duration;
    bool strict_ic = false;
    std::string controller = "agat";  // "agat", or "pdff" (rigid body only)
    unsigned long long seed = 20260818ULL;  // basin sweep
    int count = 20;                         // basin sweep
};

/// Outcome of a single scenario run. exit_code follows the command
/// convention: 0 clean, 2 controller abort (partial outputs retained).
/// Invalid input never produces a summary: the run functions throw Error
/// before any file is created, and the command maps that to exit code 1.
struct RunSummary {
    int exit_code = 0;
    int rows = 0;
    std::optional<double> final_tracking_error;
    std::optional<double> time_to_band;
    int lyapunov_violations = 0;
    double max_energy_increase = 0.0;
    double max_constraint_residual = 0.0;
    double max_control_norm = 0.0;
    std::vector<std::string> repairs_applied;
    std::optional<AbortInfo> abort;
};

/// Run one scenario (preset name, or path to a scenario file) and write
/// trajectory.csv, summary.txt, and plot.gp into opts.out_dir. Input
/// validation happens before any file is created.
RunSummary run_scenario(const std::string& preset_or_path, const RunOptions& opts);

/// Run the attitude-tracking comparison (both initial conditions, both
/// control laws) and write so3_<law>_ic<k>.csv, so3_effort_ic<k>.csv, and
/// so3_summary.txt into opts.out_dir. Returns the command exit code.
int compare_so3(const RunOptions& opts);

/// Random-start convergence sweep on the sphere with a static reference:
/// opts.count starts drawn from the seeded generator, rejecting starts
/// within 1e-3 of the error map's singular set, plus one deliberately
/// antipodal start that must fail gracefully. Writes sweep_summary.txt.
/// Returns 0 when every random start converges and holds.
int sweep_basin(const RunOptions& opts);

/// Write a preset to a scenario file. Returns the command exit code.
int export_preset(const std::string& name, const std::string& path);

/// The trajectory CSV schema for a system (header line without newline).
std::string csv_header(SystemKind system);

/// Write a log in the trajectory CSV schema (header always, then one line
/// per row, %.17g throughout).
void write_trajectory_csv(const TrajectoryLog& log, SystemKind system,
                          const std::string& path);

/// First row time from which the ambient tracking error stays below 0.05
/// through the end of the log; empty when the run aborted or never settles.
std::optional<double> hold_entry_time(const TrajectoryLog& log);

}  // namespace geotrack
