#pragma once
#include "droplet/scenario.hpp"
#include "droplet/verify.hpp"

#include <string>
#include <vector>

namespace droplet::runner {

struct RunResult {
    std::vector<std::string> files;           // artifacts written, in order
    hopflax::Solution physical;               // slices in physical variables
    std::vector<hopflax::MassCheckRow> mass;  // quarter-plane characteristic runs
    std::vector<viscous::StepLog> steplog;    // viscous runs
};

// solve the scenario and write manifest.cfg, slice/density CSVs, atoms.csv,
// boundary.csv and diagnostics.csv into out_dir
RunResult run(const scenario::Scenario& sc, const std::string& out_dir);

// solve without touching the filesystem
RunResult execute(const scenario::Scenario& sc);

struct ConvergenceRow {
    int cells;
    double distance;  // L1 distance of the last slice to the coarser level
};
// rerun the scenario across resolutions and difference consecutive levels;
// writes convergence.csv into out_dir unless it is empty
std::vector<ConvergenceRow> converge(const scenario::Scenario& sc,
                                     const std::vector<int>& cell_counts,
                                     const std::string& out_dir);

struct Check {
    std::string name;
    bool passed;
    double value;  // measured quantity
    double bound;  // tolerance it was held against
};
struct CheckReport {
    std::vector<Check> checks;
    bool all_passed = true;
};
// solve in memory and audit the result; tolerances scale with tol_scale
CheckReport verify_run(const scenario::Scenario& sc, double tol_scale = 1.0);

} // namespace droplet::runner
