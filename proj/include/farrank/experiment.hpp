#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "farrank/catalog.hpp"
#include "farrank/config.hpp"
#include "farrank/dataset.hpp"
#include "farrank/report.hpp"

namespace farrank {

struct ExperimentResult {
  SweepReport report;  // aggregated across folds
  BudgetPick pick;
  std::filesystem::path report_path;
  std::filesystem::path summary_path;
  std::filesystem::path histogram_path;
  std::filesystem::path manifest_path;
};

// The whole pipeline: ingest, derive or load the provider catalog,
// cross-validate the base recommender, sweep the fairness weight, pick
// the operating point, and write the four output files. Files appear
// only once every number is computed; a failure mid-write removes the
// partial outputs.
ExperimentResult run_experiment(const ExperimentConfig& config, int workers = 1);

// Tolerance policy for one train fold and user set: uniform mode pins
// every tolerance to 1; the personalized mode derives it from interest
// entropy, rescales it when configured, and falls back for users with
// no owned rating mass.
std::vector<double> compute_tolerances(const RatingsDataset& train,
                                       const ProviderCatalog& catalog,
                                       std::span<const std::string> users,
                                       const ExperimentConfig& config);

}  // namespace farrank
