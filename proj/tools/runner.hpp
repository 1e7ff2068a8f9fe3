#pragma once

#include <filesystem>
#include <vector>

#include "glv/config.hpp"
#include "glv/experiments.hpp"
#include "glv/field.hpp"

namespace glv::cli {

// Field the config describes: loaded from [audit] field if set, otherwise
// the product ansatz for the first eps on the configured grid (a disk when
// radius > 0).
ComplexField config_field(const RunConfig& cfg);
// Ansatz relaxed to a critical point with unit-modulus degree data on the
// disk (the degree is the sum of the vortex degrees).
ComplexField solved_field(const RunConfig& cfg, ExperimentReport* solve_report = nullptr);

// Runs cfg.experiment. Field artifacts go under out_dir; every report
// carries the seed in its inputs.
std::vector<ExperimentReport> run_experiment(const RunConfig& cfg,
                                             const std::filesystem::path& out_dir);

// Parses, runs and emits; returns the exit status (0 iff every report
// passes).
int run_config(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace glv::cli
