#pragma once

#include "boostsmooth/simulation.hpp"
#include "boostsmooth/spectral.hpp"

#include <iosfwd>
#include <string>

namespace boostsmooth::io {

/// Reads a two-column CSV with header naming columns x and y (any order,
/// extra columns ignored). Throws InputError on missing file, empty data or
/// unparsable fields.
DesignSample read_sample_csv(const std::string& path);
DesignSample read_sample_csv(std::istream& in);

void write_fitted_csv(std::ostream& out, const DesignSample& sample, const Vector& fitted);

/// One row per completed iteration: k, residual_norm, bias_norm, trace
/// (empty unless recorded), checkpoint flag.
void write_trajectory_csv(std::ostream& out, const BoostTrajectory& trajectory);

/// Rebuilds the checkpoint list (k, residual norm, trace) of a written
/// trajectory; betas and fitted values are not stored and stay empty.
BoostTrajectory read_trajectory_csv(std::istream& in, std::size_t n, const BoostConfig& config);
BoostTrajectory read_trajectory_csv(const std::string& path, std::size_t n,
                                    const BoostConfig& config);

std::string selection_json(const SelectionResult& sel, std::size_t n, bool with_scores = true);
std::string spectrum_json(const SpectrumReport& report, std::size_t top = 20);

/// Wide score table: k then one column per rule.
void write_scores_csv(std::ostream& out, const std::vector<SelectionResult>& selections);

/// Scenario from JSON. Recognized keys: function, n, error_law, smoother,
/// kernel, pilot_df (array), max_iterations (array), rules, folds,
/// replications, base_seed, grid_size, mu, variant, comparison_candidates,
/// jobs.
SimScenario parse_scenario(const std::string& json_text);
SimScenario read_scenario(const std::string& path);

/// One row per rule: function,n,error,rule,k_hat_i,mse_i...,comparison_mse,failures.
void write_table_csv(std::ostream& out, const SimSummary& summary);

/// Long format, one row per replication x pilot x rule.
void write_records_csv(std::ostream& out, const SimSummary& summary);

}  // namespace boostsmooth::io
