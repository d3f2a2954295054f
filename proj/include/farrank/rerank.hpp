#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "farrank/catalog.hpp"
#include "farrank/dataset.hpp"
#include "farrank/ranking.hpp"

namespace farrank {

// Providers already represented in a partially built list.
class CoverageState {
 public:
  explicit CoverageState(int providers);
  bool covers(int provider) const { return covered_[static_cast<std::size_t>(provider)] != 0; }
  void add(std::span<const int> providers);
  int num_covered() const { return num_covered_; }
  int size() const { return static_cast<int>(covered_.size()); }
  std::vector<int> covered_indices() const;

 private:
  std::vector<char> covered_;
  int num_covered_ = 0;
};

// Share of the user's positive rating mass owned by each provider. Items
// with several owners count once per owner, so the entries always sum to
// one. A user whose ratings touch no owned item gets an empty vector.
Eigen::VectorXd compute_interest(const RatingsDataset& train,
                                 const ProviderCatalog& catalog,
                                 std::string_view user);

// Base-2 entropy of an interest distribution; an empty interest vector
// falls back to the given value, or to the maximum log2(providers).
double compute_tolerance(const Eigen::VectorXd& interest, int providers,
                         std::optional<double> cold_fallback = {});

// Rescales a tolerance into [0, 1] by its maximum log2(providers).
double normalize_tolerance(double tolerance, int providers);

// Weight mass of the item's owners not yet covered.
double fairness_bonus(std::string_view item, const CoverageState& state,
                      const ProviderCatalog& catalog,
                      std::span<const double> weights);

// Greedy pick of up to k positions maximizing base score plus
// lambda_tau times the uncovered-owner mass, restarting the bonus
// bookkeeping from the supplied state and updating it in place. Ties go
// to the earlier position.
std::vector<int> greedy_select(std::span<const double> scores,
                               std::span<const std::span<const int>> item_providers,
                               int k, double lambda_tau,
                               std::span<const double> weights,
                               CoverageState& state);

// Re-orders the head of one scored list. The personalized mode scales
// the fairness term by the supplied tolerance; the uniform mode pins it
// to one.
RerankedList rerank(const ScoredList& list, const RerankParams& params,
                    double tolerance, const ProviderCatalog& catalog);

}  // namespace farrank
