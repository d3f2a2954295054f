#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "farrank/catalog.hpp"
#include "farrank/dataset.hpp"
#include "farrank/ranking.hpp"

namespace farrank {

// Binary-gain normalized discounted cumulative gain of one ranked list
// against held-out ratings. An item counts as relevant when the user has
// a held-out rating for it at or above `threshold`. The ideal ranking
// places min(k, number of relevant held-out items) hits up front. Users
// with no relevant held-out item have no defined value.
std::optional<double> ndcg_at_k(std::span<const std::string> ranked_items,
                                const RatingsDataset& test, std::string_view user,
                                int k, double threshold = 0.0);

// Mean fraction of the provider universe covered per user list.
double apcr(std::span<const RerankedList> lists, const ProviderCatalog& catalog);

// Recommendation slots owned by each provider, summed over all lists;
// items with several owners count once per owner.
std::vector<std::int64_t> provider_histogram(std::span<const RerankedList> lists,
                                             const ProviderCatalog& catalog);

}  // namespace farrank
