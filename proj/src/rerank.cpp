#include "farrank/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "farrank/error.hpp"

namespace farrank {

CoverageState::CoverageState(int providers) {
  if (providers < 1) throw_data("coverage needs at least one provider");
  covered_.assign(static_cast<std::size_t>(providers), 0);
}

void CoverageState::add(std::span<const int> providers) {
  for (int d : providers) {
    char& slot = covered_[static_cast<std::size_t>(d)];
    if (!slot) {
      slot = 1;
      ++num_covered_;
    }
  }
}

std::vector<int> CoverageState::covered_indices() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(num_covered_));
  for (std::size_t d = 0; d < covered_.size(); ++d) {
    if (covered_[d]) out.push_back(static_cast<int>(d));
  }
  return out;
}

Eigen::VectorXd compute_interest(const RatingsDataset& train,
                                 const ProviderCatalog& catalog,
                                 std::string_view user) {
  const std::optional<int> index = train.user_index(user);
  if (!index) throw_data("unknown user identifier '" + std::string(user) + "'");
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(catalog.num_providers());
  for (const Rating& r : train.by_user(*index)) {
    if (r.value <= 0.0) continue;
    for (int d : catalog.item_providers(train.item_id(r.item))) mass[d] += r.value;
  }
  // Normalizing by the vector's own sum keeps equal owner masses at
  // exactly equal shares.
  const double total = mass.sum();
  if (total <= 0.0) return Eigen::VectorXd();
  mass /= total;
  return mass;
}

double compute_tolerance(const Eigen::VectorXd& interest, int providers,
                         std::optional<double> cold_fallback) {
  if (providers < 1) throw_data("tolerance needs at least one provider");
  if (interest.size() == 0) {
    return cold_fallback.value_or(std::log2(static_cast<double>(providers)));
  }
  if (interest.size() != providers) {
    throw_data("interest vector size does not match the provider count");
  }
  double sum = 0.0;
  for (Eigen::Index d = 0; d < interest.size(); ++d) {
    const double q = interest[d];
    if (!std::isfinite(q) || q < 0.0) {
      throw_data("interest entries must be non-negative and finite");
    }
    sum += q;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw_data("interest must sum to one");
  double tau = 0.0;
  for (Eigen::Index d = 0; d < interest.size(); ++d) {
    const double q = interest[d];
    if (q > 0.0) tau -= q * std::log2(q);
  }
  return tau <= 0.0 ? 0.0 : tau;
}

double normalize_tolerance(double tolerance, int providers) {
  if (providers < 1) throw_data("tolerance needs at least one provider");
  const double cap = std::log2(static_cast<double>(providers));
  if (cap <= 0.0) return 1.0;
  return tolerance / cap;
}

double fairness_bonus(std::string_view item, const CoverageState& state,
                      const ProviderCatalog& catalog,
                      std::span<const double> weights) {
  if (!catalog.contains_item(item)) {
    throw_data("item '" + std::string(item) + "' has no provider assignment");
  }
  double bonus = 0.0;
  for (int d : catalog.item_providers(item)) {
    if (!state.covers(d)) bonus += weights[static_cast<std::size_t>(d)];
  }
  return bonus;
}

std::vector<int> greedy_select(std::span<const double> scores,
                               std::span<const std::span<const int>> item_providers,
                               int k, double lambda_tau,
                               std::span<const double> weights,
                               CoverageState& state) {
  if (scores.size() != item_providers.size()) {
    throw_data("scores and provider lists differ in length");
  }
  const std::size_t n = scores.size();
  const auto keep = std::min<std::size_t>(n, k < 0 ? 0 : static_cast<std::size_t>(k));
  std::vector<int> picks;
  picks.reserve(keep);
  std::vector<char> used(n, 0);
  while (picks.size() < keep) {
    int best = -1;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      double bonus = 0.0;
      for (int d : item_providers[i]) {
        if (!state.covers(d)) bonus += weights[static_cast<std::size_t>(d)];
      }
      const double value = scores[i] + lambda_tau * bonus;
      if (value > best_value) {
        best_value = value;
        best = static_cast<int>(i);
      }
    }
    used[static_cast<std::size_t>(best)] = 1;
    picks.push_back(best);
    state.add(item_providers[static_cast<std::size_t>(best)]);
  }
  return picks;
}

RerankedList rerank(const ScoredList& list, const RerankParams& params,
                    double tolerance, const ProviderCatalog& catalog) {
  if (list.empty()) throw_data("cannot rerank an empty list");
  validate(params, catalog);
  if (!std::isfinite(tolerance) || tolerance < 0.0) {
    throw_data("tolerance must be non-negative and finite");
  }
  const std::vector<double> weights = effective_weights(params, catalog);

  const auto entries = list.entries();
  std::vector<double> scores;
  scores.reserve(entries.size());
  std::vector<std::span<const int>> providers;
  providers.reserve(entries.size());
  for (const ScoredEntry& e : entries) {
    if (!catalog.contains_item(e.item)) {
      throw_data("item '" + e.item + "' has no provider assignment");
    }
    scores.push_back(e.score);
    providers.push_back(catalog.item_providers(e.item));
  }

  const double tau = params.mode == RerankMode::far ? 1.0 : tolerance;
  CoverageState state(catalog.num_providers());
  const std::vector<int> picks =
      greedy_select(scores, providers, params.k, params.lambda * tau, weights, state);

  std::vector<std::string> items;
  items.reserve(picks.size());
  for (int i : picks) items.push_back(entries[static_cast<std::size_t>(i)].item);
  return RerankedList(std::string(list.user()), std::move(items),
                      state.covered_indices());
}

}  // namespace farrank
