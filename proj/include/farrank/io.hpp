#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "farrank/catalog.hpp"
#include "farrank/dataset.hpp"
#include "farrank/ranking.hpp"

namespace farrank {

// Column layout of a delimiter-separated ratings file. A delimiter of
// ' ' splits on any whitespace run; every other delimiter splits on the
// exact character. Lines starting with '#' and blank lines are skipped.
struct RatingsFileSpec {
  char delimiter = '\t';
  int user_column = 0;
  int item_column = 1;
  int rating_column = 2;
  bool clamp_negative = false;
};

RatingsDataset load_ratings(const std::filesystem::path& path,
                            const RatingsFileSpec& spec = {},
                            IngestStats* stats = nullptr);

void save_ratings(const RatingsDataset& data, const std::filesystem::path& path,
                  char delimiter = '\t');

// Two columns item_id, provider_id; an item repeated across lines owns
// every listed provider.
ProviderCatalog load_provider_map(const std::filesystem::path& path,
                                  char delimiter = '\t');

void save_provider_map(const ProviderCatalog& catalog,
                       const std::filesystem::path& path, char delimiter = '\t');

// Optional per-provider preference weights: rows provider_id, weight.
// Unlisted providers get weight 0; the vector is normalized to sum 1.
std::vector<double> load_provider_weights(const std::filesystem::path& path,
                                          const ProviderCatalog& catalog,
                                          char delimiter = '\t');

// Raw transaction rows: a header names the attributes, one transaction
// per line. The `user_column` attribute identifies the acting user and
// is not part of the categorical schema.
struct TransactionTable {
  std::vector<std::string> attributes;
  std::vector<std::string> users;
  std::vector<std::vector<std::string>> values;  // aligned with `attributes`

  std::size_t size() const { return users.size(); }
  int attribute_index(std::string_view name) const;
};

TransactionTable load_transactions(const std::filesystem::path& path,
                                   char delimiter = '\t',
                                   std::string_view user_column = "user");

// Externally computed rankings: rows user_id, item_id, score in any
// order. Per-user lists come back sorted by score descending, ties in
// file order; list order follows first appearance of each user.
std::vector<ScoredList> import_rankings(const std::filesystem::path& path,
                                        char delimiter = '\t');

// Inverse of import_rankings, with enough precision for an exact
// round-trip.
void export_rankings(std::span<const ScoredList> lists,
                     const std::filesystem::path& path, char delimiter = '\t');

}  // namespace farrank
