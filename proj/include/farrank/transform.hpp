#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "farrank/catalog.hpp"
#include "farrank/dataset.hpp"
#include "farrank/io.hpp"

namespace farrank {

// Assigns every item of `data` exactly one of `c` synthetic providers
// (named p0..p<c-1>), drawn from a geometric distribution with success
// probability `p` truncated and renormalized over the c indices.
// Identical seeds give identical catalogs.
ProviderCatalog assign_synthetic_providers(const RatingsDataset& data, int c,
                                           double p, std::uint64_t seed);

// Truncated geometric pmf over provider indices 0..c-1.
std::vector<double> truncated_geometric_pmf(int c, double p);

struct PseudoItemResult {
  RatingsDataset ratings;
  ProviderCatalog catalog;
};

// Collapses transactions into pseudo-items: every distinct tuple of
// `grouping` attribute values becomes one item, the rating is the
// user's transaction count for that tuple, and the provider is the
// tuple's `provider_attribute` value. If `amount_attribute` is set its
// numeric values are replaced by an equal-count quantile bucket index
// over `bins` buckets before grouping.
PseudoItemResult build_pseudo_items(const TransactionTable& table,
                                    const std::vector<std::string>& grouping,
                                    const std::string& provider_attribute,
                                    const std::optional<std::string>& amount_attribute,
                                    int bins);

// Iteratively prunes users and items with fewer than k ratings until
// both sides sit at the fixed point. May return an empty dataset.
RatingsDataset k_core_filter(const RatingsDataset& data, int k);

struct FoldSplit {
  int fold_id = 0;
  RatingsDataset train;
  RatingsDataset test;
};

// Randomly partitions the ratings into `folds` near-equal test parts
// (sizes differ by at most 1); fold i trains on everything else. Both
// halves keep the parent's index universe.
std::vector<FoldSplit> split_folds(const RatingsDataset& data, int folds,
                                   std::uint64_t seed);

}  // namespace farrank
