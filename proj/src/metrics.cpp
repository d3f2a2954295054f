#include "farrank/metrics.hpp"

#include <cmath>

#include "farrank/error.hpp"

namespace farrank {

std::optional<double> ndcg_at_k(std::span<const std::string> ranked_items,
                                const RatingsDataset& test, std::string_view user,
                                int k, double threshold) {
  if (k < 1) throw_data("evaluation depth must be at least 1");
  const std::optional<int> uidx = test.user_index(user);
  if (!uidx) return std::nullopt;

  std::size_t relevant = 0;
  for (const Rating& r : test.by_user(*uidx)) {
    if (r.value >= threshold) ++relevant;
  }
  if (relevant == 0) return std::nullopt;

  const auto depth = std::min<std::size_t>(ranked_items.size(),
                                           static_cast<std::size_t>(k));
  double dcg = 0.0;
  for (std::size_t j = 0; j < depth; ++j) {
    const std::optional<int> iidx = test.item_index(ranked_items[j]);
    if (!iidx) continue;
    const std::optional<double> held = test.rating(*uidx, *iidx);
    if (held && *held >= threshold) {
      dcg += 1.0 / std::log2(static_cast<double>(j) + 2.0);
    }
  }
  const auto ideal = std::min<std::size_t>(relevant, static_cast<std::size_t>(k));
  double idcg = 0.0;
  for (std::size_t j = 0; j < ideal; ++j) {
    idcg += 1.0 / std::log2(static_cast<double>(j) + 2.0);
  }
  return dcg / idcg;
}

double apcr(std::span<const RerankedList> lists, const ProviderCatalog& catalog) {
  if (lists.empty()) throw_data("coverage rate needs at least one list");
  double covered = 0.0;
  for (const RerankedList& list : lists) covered += list.num_covered();
  return covered / (static_cast<double>(catalog.num_providers()) *
                    static_cast<double>(lists.size()));
}

std::vector<std::int64_t> provider_histogram(std::span<const RerankedList> lists,
                                             const ProviderCatalog& catalog) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(catalog.num_providers()), 0);
  for (const RerankedList& list : lists) {
    for (const std::string& item : list.items()) {
      if (!catalog.contains_item(item)) {
        throw_data("item '" + item + "' has no provider assignment");
      }
      for (int d : catalog.item_providers(item)) {
        ++counts[static_cast<std::size_t>(d)];
      }
    }
  }
  return counts;
}

}  // namespace farrank
