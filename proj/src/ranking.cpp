#include "farrank/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "farrank/error.hpp"

namespace farrank {

ScoredList::ScoredList(std::string user, std::vector<ScoredEntry> entries)
    : user_(std::move(user)), entries_(std::move(entries)) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const ScoredEntry& e = entries_[i];
    if (!std::isfinite(e.score)) {
      throw_data("score for item " + e.item + " of user " + user_ + " is not finite");
    }
    if (!seen.insert(e.item).second) {
      throw_data("duplicate item " + e.item + " in ranking for user " + user_);
    }
    if (i > 0 && entries_[i - 1].score < e.score) {
      throw_data("ranking for user " + user_ + " is not sorted by score");
    }
  }
}

ScoredList ScoredList::from_sorted(std::string user, std::vector<ScoredEntry> entries) {
  return ScoredList(std::move(user), std::move(entries));
}

ScoredList ScoredList::from_unsorted(std::string user, std::vector<ScoredEntry> entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const ScoredEntry& a, const ScoredEntry& b) {
                     return a.score > b.score;
                   });
  return ScoredList(std::move(user), std::move(entries));
}

std::string_view to_string(RerankMode mode) {
  return mode == RerankMode::far ? "FAR" : "PFAR";
}

std::optional<RerankMode> parse_mode(std::string_view text) {
  if (text == "FAR" || text == "far") return RerankMode::far;
  if (text == "PFAR" || text == "pfar") return RerankMode::pfar;
  return std::nullopt;
}

void validate(const RerankParams& params, const ProviderCatalog& catalog) {
  if (!(params.lambda >= 0.0) || !std::isfinite(params.lambda)) {
    throw_data("lambda must be a finite non-negative value");
  }
  if (params.k < 1) throw_data("k must be at least 1");
  if (params.provider_weights.empty()) return;
  if (static_cast<int>(params.provider_weights.size()) != catalog.num_providers()) {
    throw_data("provider weights must have one entry per catalog provider");
  }
  double sum = 0.0;
  for (double w : params.provider_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw_data("provider weights must be finite and non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw_data("provider weights must sum to 1");
  }
}

std::vector<double> effective_weights(const RerankParams& params,
                                      const ProviderCatalog& catalog) {
  if (!params.provider_weights.empty()) return params.provider_weights;
  const int c = catalog.num_providers();
  return std::vector<double>(static_cast<std::size_t>(c), 1.0 / c);
}

RerankedList::RerankedList(std::string user, std::vector<std::string> items,
                           std::vector<int> covered_providers)
    : user_(std::move(user)),
      items_(std::move(items)),
      covered_(std::move(covered_providers)) {
  std::unordered_set<std::string_view> seen;
  for (const std::string& item : items_) {
    if (!seen.insert(item).second) {
      throw_data("duplicate item " + item + " in re-ranked list for user " + user_);
    }
  }
  std::sort(covered_.begin(), covered_.end());
  covered_.erase(std::unique(covered_.begin(), covered_.end()), covered_.end());
}

}  // namespace farrank
