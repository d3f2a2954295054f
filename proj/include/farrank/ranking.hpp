#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "farrank/catalog.hpp"

namespace farrank {

struct ScoredEntry {
  std::string item;
  double score = 0.0;

  friend bool operator==(const ScoredEntry&, const ScoredEntry&) = default;
};

// One user's base ranking: entries sorted by score descending, ties in
// their original order, no duplicate items.
class ScoredList {
public:
  ScoredList() = default;

  // `entries` must already be in non-increasing score order.
  static ScoredList from_sorted(std::string user, std::vector<ScoredEntry> entries);

  // Stable-sorts by score descending first; equal scores keep their
  // input order.
  static ScoredList from_unsorted(std::string user, std::vector<ScoredEntry> entries);

  const std::string& user() const { return user_; }
  std::span<const ScoredEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const ScoredList&, const ScoredList&) = default;

private:
  ScoredList(std::string user, std::vector<ScoredEntry> entries);

  std::string user_;
  std::vector<ScoredEntry> entries_;
};

enum class RerankMode { far, pfar };

std::string_view to_string(RerankMode mode);
std::optional<RerankMode> parse_mode(std::string_view text);

// Weighting of the greedy criterion. `provider_weights` is indexed like
// the catalog's providers; empty means uniform 1/c. FAR is PFAR with
// every user's tolerance forced to 1.
struct RerankParams {
  double lambda = 0.0;
  int k = 10;
  RerankMode mode = RerankMode::far;
  std::vector<double> provider_weights;
};

// Throws on negative lambda, k < 1, or weights that are negative,
// mis-sized, or do not sum to 1 within 1e-9.
void validate(const RerankParams& params, const ProviderCatalog& catalog);

// Materialized weights: params.provider_weights or uniform 1/c.
std::vector<double> effective_weights(const RerankParams& params,
                                      const ProviderCatalog& catalog);

// Per-user provider interest and the entropy-based diversity tolerance
// derived from it. `interest` has one slot per catalog provider and
// sums to 1; size 0 marks a cold user with no rated provider mass.
struct ToleranceProfile {
  std::string user;
  Eigen::VectorXd interest;
  double tolerance = 0.0;
};

// Final top-K selection for one user plus the providers it covers.
class RerankedList {
public:
  RerankedList() = default;
  RerankedList(std::string user, std::vector<std::string> items,
               std::vector<int> covered_providers);

  const std::string& user() const { return user_; }
  std::span<const std::string> items() const { return items_; }
  // Sorted catalog provider indices owning at least one listed item.
  std::span<const int> covered_providers() const { return covered_; }
  int num_covered() const { return static_cast<int>(covered_.size()); }

private:
  std::string user_;
  std::vector<std::string> items_;
  std::vector<int> covered_;
};

}  // namespace farrank
