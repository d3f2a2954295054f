#include "farrank/transform.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "farrank/error.hpp"
#include "farrank/rng.hpp"

namespace farrank {

std::vector<double> truncated_geometric_pmf(int c, double p) {
  if (c < 1) throw_data("provider count must be at least 1");
  if (!(p > 0.0 && p < 1.0)) throw_data("geometric parameter must lie in (0, 1)");
  std::vector<double> pmf(static_cast<std::size_t>(c));
  double mass = 0.0;
  double term = p;
  for (int j = 0; j < c; ++j) {
    pmf[static_cast<std::size_t>(j)] = term;
    mass += term;
    term *= 1.0 - p;
  }
  for (double& q : pmf) q /= mass;
  return pmf;
}

ProviderCatalog assign_synthetic_providers(const RatingsDataset& data, int c,
                                           double p, std::uint64_t seed) {
  if (data.num_items() == 0) throw_data("cannot assign providers to an empty dataset");
  const auto pmf = truncated_geometric_pmf(c, p);
  std::vector<double> cdf(pmf.size());
  std::partial_sum(pmf.begin(), pmf.end(), cdf.begin());

  Rng rng(mix_seed(seed, "synthetic-providers"));
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(static_cast<std::size_t>(data.num_items()));
  for (int item = 0; item < data.num_items(); ++item) {
    const double u = rng.uniform();
    int j = c - 1;
    for (int q = 0; q < c; ++q) {
      if (u < cdf[static_cast<std::size_t>(q)]) {
        j = q;
        break;
      }
    }
    pairs.emplace_back(data.item_id(item), "p" + std::to_string(j));
  }
  return ProviderCatalog::from_pairs(pairs);
}

namespace {

// Equal-count buckets: records sorted by value (stable, so equal values
// keep encounter order) are cut into `bins` contiguous runs.
std::vector<int> quantile_buckets(const std::vector<double>& values, int bins) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<int> bucket(n, 0);
  for (std::size_t pos = 0; pos < n; ++pos) {
    bucket[order[pos]] =
        static_cast<int>(pos * static_cast<std::size_t>(bins) / std::max<std::size_t>(n, 1));
  }
  return bucket;
}

}  // namespace

PseudoItemResult build_pseudo_items(const TransactionTable& table,
                                    const std::vector<std::string>& grouping,
                                    const std::string& provider_attribute,
                                    const std::optional<std::string>& amount_attribute,
                                    int bins) {
  if (grouping.empty()) throw_data("pseudo-item grouping needs at least one attribute");
  std::vector<int> group_cols;
  for (const std::string& name : grouping) {
    int col = table.attribute_index(name);
    if (col < 0) throw_data("unknown grouping attribute '" + name + "'");
    group_cols.push_back(col);
  }
  if (std::find(grouping.begin(), grouping.end(), provider_attribute) ==
      grouping.end()) {
    throw_data("provider attribute '" + provider_attribute +
               "' must be one of the grouping attributes");
  }
  const int provider_col = table.attribute_index(provider_attribute);

  int amount_col = -1;
  std::vector<int> buckets;
  if (amount_attribute) {
    if (bins < 1) throw_data("amount binning needs at least one bucket");
    amount_col = table.attribute_index(*amount_attribute);
    if (amount_col < 0) {
      throw_data("unknown amount attribute '" + *amount_attribute + "'");
    }
    std::vector<double> amounts(table.size());
    for (std::size_t r = 0; r < table.size(); ++r) {
      const std::string& text = table.values[r][static_cast<std::size_t>(amount_col)];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || ptr != text.data() + text.size() || !(v >= 0.0)) {
        throw_data("amount attribute value '" + text +
                   "' is not a non-negative number");
      }
      amounts[r] = v;
    }
    buckets = quantile_buckets(amounts, bins);
  }

  // Pseudo-item id = grouping values joined by '|', amount replaced by
  // its bucket label.
  StringMap<double> counts;  // "user\x1fpseudo" -> transaction count
  std::vector<std::pair<std::string, std::string>> catalog_pairs;
  StringMap<char> seen_items;
  std::vector<std::pair<std::string, std::string>> pair_order;
  std::vector<RawRating> triples;
  StringMap<std::size_t> triple_slot;
  for (std::size_t r = 0; r < table.size(); ++r) {
    std::string pseudo;
    for (std::size_t g = 0; g < group_cols.size(); ++g) {
      if (g > 0) pseudo.push_back('|');
      if (group_cols[g] == amount_col && amount_col >= 0) {
        pseudo += "bin" + std::to_string(buckets[r]);
      } else {
        pseudo += table.values[r][static_cast<std::size_t>(group_cols[g])];
      }
    }
    if (seen_items.emplace(pseudo, 1).second) {
      catalog_pairs.emplace_back(
          pseudo, table.values[r][static_cast<std::size_t>(provider_col)]);
    }
    std::string key = table.users[r] + '\x1f' + pseudo;
    if (auto it = triple_slot.find(key); it != triple_slot.end()) {
      triples[it->second].value += 1.0;
    } else {
      triple_slot.emplace(std::move(key), triples.size());
      triples.push_back(RawRating{table.users[r], pseudo, 1.0});
    }
  }
  if (triples.empty()) throw_data("no transactions to build pseudo-items from");

  PseudoItemResult result;
  result.ratings = RatingsDataset::build(triples);
  result.catalog = ProviderCatalog::from_pairs(catalog_pairs);
  return result;
}

RatingsDataset k_core_filter(const RatingsDataset& data, int k) {
  if (k < 1) throw_data("k-core threshold must be at least 1");
  std::vector<Rating> kept(data.ratings().begin(), data.ratings().end());
  std::vector<std::size_t> user_deg(static_cast<std::size_t>(data.num_users()));
  std::vector<std::size_t> item_deg(static_cast<std::size_t>(data.num_items()));
  bool changed = true;
  while (changed) {
    std::fill(user_deg.begin(), user_deg.end(), 0);
    std::fill(item_deg.begin(), item_deg.end(), 0);
    for (const Rating& r : kept) {
      ++user_deg[static_cast<std::size_t>(r.user)];
      ++item_deg[static_cast<std::size_t>(r.item)];
    }
    const auto threshold = static_cast<std::size_t>(k);
    auto drop = [&](const Rating& r) {
      return user_deg[static_cast<std::size_t>(r.user)] < threshold ||
             item_deg[static_cast<std::size_t>(r.item)] < threshold;
    };
    auto it = std::remove_if(kept.begin(), kept.end(), drop);
    changed = it != kept.end();
    kept.erase(it, kept.end());
  }
  return data.with_ratings(std::move(kept)).compacted();
}

std::vector<FoldSplit> split_folds(const RatingsDataset& data, int folds,
                                   std::uint64_t seed) {
  if (folds < 2) throw_data("cross validation needs at least 2 folds");
  if (data.num_ratings() < static_cast<std::size_t>(folds)) {
    throw_data("dataset has fewer ratings than folds");
  }
  std::vector<std::size_t> order(data.num_ratings());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(seed, "fold-split"));
  rng.shuffle(order);

  auto all = data.ratings();
  std::vector<std::vector<Rating>> test_parts(static_cast<std::size_t>(folds));
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    test_parts[pos % static_cast<std::size_t>(folds)].push_back(all[order[pos]]);
  }

  std::vector<FoldSplit> splits;
  splits.reserve(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    std::vector<Rating> train;
    train.reserve(data.num_ratings() - test_parts[static_cast<std::size_t>(f)].size());
    for (int g = 0; g < folds; ++g) {
      if (g == f) continue;
      const auto& part = test_parts[static_cast<std::size_t>(g)];
      train.insert(train.end(), part.begin(), part.end());
    }
    splits.push_back(FoldSplit{
        f, data.with_ratings(std::move(train)),
        data.with_ratings(std::vector<Rating>(test_parts[static_cast<std::size_t>(f)]))});
  }
  return splits;
}

}  // namespace farrank
