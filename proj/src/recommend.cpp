#include "farrank/recommend.hpp"

#include <algorithm>
#include <numeric>

#include "farrank/error.hpp"

namespace farrank {

namespace {

int resolve_user(const RatingsDataset& train, std::string_view user) {
  const std::optional<int> found = train.user_index(user);
  if (!found) throw_data("unknown user identifier '" + std::string(user) + "'");
  const int index = *found;
  bool rated = false;
  for (const Rating& r : train.by_user(index)) {
    if (r.value > 0.0) {
      rated = true;
      break;
    }
  }
  if (!rated) {
    throw_data("user '" + std::string(user) + "' has no training ratings");
  }
  return index;
}

ScoredList assemble(const RatingsDataset& train, std::string_view user, int index,
                    const Eigen::VectorXd& scores, int z) {
  if (z < 1) throw_data("ranking depth must be at least 1");
  std::vector<char> rated(static_cast<std::size_t>(train.num_items()), 0);
  for (const Rating& r : train.by_user(index)) {
    if (r.value > 0.0) rated[static_cast<std::size_t>(r.item)] = 1;
  }
  std::vector<int> candidates;
  candidates.reserve(static_cast<std::size_t>(train.num_items()));
  for (int i = 0; i < train.num_items(); ++i) {
    if (!rated[static_cast<std::size_t>(i)]) candidates.push_back(i);
  }
  auto order = [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  const auto keep = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(z));
  std::partial_sort(candidates.begin(),
                    candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), order);
  candidates.resize(keep);

  std::vector<ScoredEntry> entries;
  entries.reserve(keep);
  for (int i : candidates) {
    entries.push_back(ScoredEntry{train.item_id(i), scores[i]});
  }
  return ScoredList::from_sorted(std::string(user), std::move(entries));
}

}  // namespace

ScoredList recommend(const NeighborhoodModel& model, const RatingsDataset& train,
                     std::string_view user, int z) {
  if (model.num_users() != train.num_users() ||
      model.num_items() != train.num_items()) {
    throw_data("model and dataset shapes differ");
  }
  const int index = resolve_user(train, user);
  return assemble(train, user, index, model.score_all(index), z);
}

ScoredList recommend(const FactorModel& model, const RatingsDataset& train,
                     std::string_view user, int z) {
  if (model.user_factors.rows() != train.num_users() ||
      model.item_factors.rows() != train.num_items()) {
    throw_data("model and dataset shapes differ");
  }
  const int index = resolve_user(train, user);
  const Eigen::VectorXd scores =
      model.item_factors * model.user_factors.row(index).transpose();
  return assemble(train, user, index, scores, z);
}

ScoredList normalize_scores(const ScoredList& list) {
  if (list.empty()) return list;
  auto entries = std::vector<ScoredEntry>(list.entries().begin(), list.entries().end());
  const double hi = entries.front().score;
  const double lo = entries.back().score;
  if (hi == lo) {
    for (ScoredEntry& e : entries) e.score = 1.0;
  } else {
    for (ScoredEntry& e : entries) e.score = (e.score - lo) / (hi - lo);
  }
  return ScoredList::from_sorted(std::string(list.user()), std::move(entries));
}

ScoredList truncate_list(const ScoredList& list, int z) {
  if (z < 1) throw_data("ranking depth must be at least 1");
  if (list.size() <= static_cast<std::size_t>(z)) return list;
  std::vector<ScoredEntry> entries(list.entries().begin(),
                                   list.entries().begin() + z);
  return ScoredList::from_sorted(std::string(list.user()), std::move(entries));
}

}  // namespace farrank
