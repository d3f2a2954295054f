#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "farrank/dataset.hpp"

namespace farrank {

// Item -> owning-providers relation. Providers are interned in
// first-appearance order; each item maps to a non-empty, sorted set of
// provider indices. Ownership is deterministic and binary: an item
// either belongs to a provider or it does not.
class ProviderCatalog {
public:
  ProviderCatalog() = default;

  // Pairs may repeat an item to give it several providers; exact
  // (item, provider) duplicates collapse silently. Throws if no pairs.
  static ProviderCatalog from_pairs(
      const std::vector<std::pair<std::string, std::string>>& pairs);

  int num_providers() const { return static_cast<int>(provider_ids_.size()); }
  std::size_t num_items() const { return item_ids_.size(); }

  const std::vector<std::string>& providers() const { return provider_ids_; }
  const std::vector<std::string>& items() const { return item_ids_; }

  const std::string& provider_id(int p) const { return provider_ids_.at(p); }
  std::optional<int> provider_index(std::string_view id) const;

  bool contains_item(std::string_view item) const;

  // Sorted provider indices owning `item`; empty span for unknown items.
  std::span<const int> item_providers(std::string_view item) const;

  bool owns(std::string_view item, std::string_view provider) const;

  // Order-insensitive equality: same provider set, same ownership.
  bool same_content(const ProviderCatalog& other) const;

private:
  std::vector<std::string> provider_ids_;
  StringMap<int> provider_index_;
  std::vector<std::string> item_ids_;  // first-appearance order
  StringMap<int> item_slot_;
  std::vector<std::vector<int>> owners_;  // per item slot, sorted
};

}  // namespace farrank
