#include "farrank/catalog.hpp"

#include <algorithm>

#include "farrank/error.hpp"

namespace farrank {

ProviderCatalog ProviderCatalog::from_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  if (pairs.empty()) {
    throw_data("provider catalog requires at least one (item, provider) pair");
  }
  ProviderCatalog catalog;
  for (const auto& [item, provider] : pairs) {
    int p;
    if (auto it = catalog.provider_index_.find(provider);
        it != catalog.provider_index_.end()) {
      p = it->second;
    } else {
      p = catalog.num_providers();
      catalog.provider_ids_.push_back(provider);
      catalog.provider_index_.emplace(provider, p);
    }
    int slot;
    if (auto it = catalog.item_slot_.find(item); it != catalog.item_slot_.end()) {
      slot = it->second;
    } else {
      slot = static_cast<int>(catalog.item_ids_.size());
      catalog.item_ids_.push_back(item);
      catalog.item_slot_.emplace(item, slot);
      catalog.owners_.emplace_back();
    }
    auto& owners = catalog.owners_[static_cast<std::size_t>(slot)];
    auto pos = std::lower_bound(owners.begin(), owners.end(), p);
    if (pos == owners.end() || *pos != p) owners.insert(pos, p);
  }
  return catalog;
}

std::optional<int> ProviderCatalog::provider_index(std::string_view id) const {
  auto it = provider_index_.find(id);
  if (it == provider_index_.end()) return std::nullopt;
  return it->second;
}

bool ProviderCatalog::contains_item(std::string_view item) const {
  return item_slot_.find(item) != item_slot_.end();
}

std::span<const int> ProviderCatalog::item_providers(std::string_view item) const {
  auto it = item_slot_.find(item);
  if (it == item_slot_.end()) return {};
  return owners_[static_cast<std::size_t>(it->second)];
}

bool ProviderCatalog::owns(std::string_view item, std::string_view provider) const {
  auto p = provider_index(provider);
  if (!p) return false;
  auto owners = item_providers(item);
  return std::binary_search(owners.begin(), owners.end(), *p);
}

bool ProviderCatalog::same_content(const ProviderCatalog& other) const {
  if (num_providers() != other.num_providers() || num_items() != other.num_items()) {
    return false;
  }
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sorted(provider_ids_) != sorted(other.provider_ids_)) return false;
  for (std::size_t slot = 0; slot < item_ids_.size(); ++slot) {
    const std::string& item = item_ids_[slot];
    auto theirs = other.item_providers(item);
    const auto& ours = owners_[slot];
    if (ours.size() != theirs.size()) return false;
    std::vector<std::string> a, b;
    for (int p : ours) a.push_back(provider_id(p));
    for (int p : theirs) b.push_back(other.provider_id(p));
    if (sorted(std::move(a)) != sorted(std::move(b))) return false;
  }
  return true;
}

}  // namespace farrank
