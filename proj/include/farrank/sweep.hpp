#pragma once

#include <span>
#include <vector>

#include "farrank/catalog.hpp"
#include "farrank/dataset.hpp"
#include "farrank/ranking.hpp"
#include "farrank/report.hpp"

namespace farrank {

// Ascending grid 0, step, 2*step, ... capped by lambda_max. Grid points
// are built from integer multiples of the step snapped to a micro-unit
// lattice, so they print cleanly and never drift.
std::vector<double> lambda_grid(double lambda_max, double step);

// Evaluates the whole trade-off curve for one set of base rankings:
// every grid point re-ranks every list and scores ranking quality
// against held-out ratings, coverage, and per-provider exposure.
// `tolerances` pairs with `base` in the personalized mode and is ignored
// in the uniform mode. `params.lambda` is ignored; the grid drives it.
// Rows land in grid order regardless of worker count.
SweepReport lambda_sweep(std::span<const ScoredList> base,
                         std::span<const double> tolerances,
                         const RatingsDataset& test,
                         const ProviderCatalog& catalog,
                         const RerankParams& params, std::span<const double> grid,
                         double relevance_threshold, int workers);

// Largest-coverage row whose ranking quality gives up at most `budget`
// of the base row's; ties prefer the smaller lambda.
BudgetPick apcr_at_ndcg_budget(const SweepReport& report, double budget);

}  // namespace farrank
