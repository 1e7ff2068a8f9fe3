#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "glv/experiments.hpp"

namespace glv {

// One JSON object per line; runtime is left out so that identical runs give
// identical bytes.
std::string report_json(const ExperimentReport& r);
// Header row then one data row: inputs, predicted, measured, tolerance,
// pass, extras.
std::string report_csv(const ExperimentReport& r);
// theta against tau from density_sweep reports: one row per kappa, one
// column per tau (empty cells where a pair was not run).
std::string theta_tau_table(const std::vector<ExperimentReport>& reports);

// Writes into dir (created if needed):
//   index.txt        one report file name per line (empty for no reports)
//   reports.jsonl    report_json of every report
//   NNN_<name>.csv   report_csv of report NNN
//   NNN_<name>_<table>.csv  tables attached to report NNN
//   theta_vs_tau.csv when density_sweep reports are present
//   run.log          appended: timestamp and runtimes (sidecar, not data)
// Returns the data files written. IO failures throw Error naming the path.
std::vector<std::filesystem::path> emit_report(const std::vector<ExperimentReport>& reports,
                                               const std::filesystem::path& dir);

// Writes text to path, replacing it; throws Error naming the path.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace glv
