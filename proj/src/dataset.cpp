#include "farrank/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "farrank/error.hpp"

namespace farrank {

RatingsDataset RatingsDataset::build(const std::vector<RawRating>& triples,
                                     bool clamp_negative, IngestStats* stats) {
  RatingsDataset data;
  IngestStats local;

  auto intern = [](StringMap<int>& index, std::vector<std::string>& ids,
                   const std::string& id) {
    auto it = index.find(id);
    if (it != index.end()) return it->second;
    int next = static_cast<int>(ids.size());
    ids.push_back(id);
    index.emplace(id, next);
    return next;
  };

  StringMap<int> pair_slots;  // "user\x1fitem" -> slot in by_user_
  std::string key;
  for (const RawRating& raw : triples) {
    double value = raw.value;
    if (!std::isfinite(value)) {
      throw_data("rating for (" + raw.user + ", " + raw.item + ") is not finite");
    }
    if (value < 0.0) {
      if (!clamp_negative) {
        throw_data("negative rating for (" + raw.user + ", " + raw.item + ")");
      }
      value = 0.0;
      ++local.negatives_clamped;
    }
    int u = intern(data.user_index_, data.user_ids_, raw.user);
    int i = intern(data.item_index_, data.item_ids_, raw.item);
    key.assign(raw.user);
    key.push_back('\x1f');
    key.append(raw.item);
    auto it = pair_slots.find(key);
    if (it != pair_slots.end()) {
      data.by_user_[static_cast<std::size_t>(it->second)].value = value;  // last wins
      ++local.duplicates_dropped;
    } else {
      pair_slots.emplace(key, static_cast<int>(data.by_user_.size()));
      data.by_user_.push_back(Rating{u, i, value});
    }
  }

  data.index_ratings();
  if (stats) *stats = local;
  return data;
}

void RatingsDataset::index_ratings() {
  std::sort(by_user_.begin(), by_user_.end(), [](const Rating& a, const Rating& b) {
    return a.user != b.user ? a.user < b.user : a.item < b.item;
  });
  by_item_ = by_user_;
  std::sort(by_item_.begin(), by_item_.end(), [](const Rating& a, const Rating& b) {
    return a.item != b.item ? a.item < b.item : a.user < b.user;
  });

  auto offsets = [](const std::vector<Rating>& sorted, int count, auto field) {
    std::vector<std::size_t> out(static_cast<std::size_t>(count) + 1, 0);
    for (const Rating& r : sorted) ++out[static_cast<std::size_t>(field(r)) + 1];
    for (std::size_t i = 1; i < out.size(); ++i) out[i] += out[i - 1];
    return out;
  };
  user_offsets_ = offsets(by_user_, num_users(), [](const Rating& r) { return r.user; });
  item_offsets_ = offsets(by_item_, num_items(), [](const Rating& r) { return r.item; });
}

std::span<const Rating> RatingsDataset::by_user(int user) const {
  if (user < 0 || user >= num_users()) return {};
  auto u = static_cast<std::size_t>(user);
  return {by_user_.data() + user_offsets_[u], user_offsets_[u + 1] - user_offsets_[u]};
}

std::span<const Rating> RatingsDataset::by_item(int item) const {
  if (item < 0 || item >= num_items()) return {};
  auto i = static_cast<std::size_t>(item);
  return {by_item_.data() + item_offsets_[i], item_offsets_[i + 1] - item_offsets_[i]};
}

std::optional<int> RatingsDataset::user_index(std::string_view id) const {
  auto it = user_index_.find(id);
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> RatingsDataset::item_index(std::string_view id) const {
  auto it = item_index_.find(id);
  if (it == item_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> RatingsDataset::rating(int user, int item) const {
  auto row = by_user(user);
  auto it = std::lower_bound(row.begin(), row.end(), item,
                             [](const Rating& r, int i) { return r.item < i; });
  if (it == row.end() || it->item != item) return std::nullopt;
  return it->value;
}

RatingsDataset RatingsDataset::with_ratings(std::vector<Rating> triples) const {
  RatingsDataset out;
  out.user_ids_ = user_ids_;
  out.item_ids_ = item_ids_;
  out.user_index_ = user_index_;
  out.item_index_ = item_index_;
  for (const Rating& r : triples) {
    if (r.user < 0 || r.user >= num_users() || r.item < 0 || r.item >= num_items()) {
      throw_data("rating references an index outside the dataset universe");
    }
  }
  out.by_user_ = std::move(triples);
  out.index_ratings();
  return out;
}

RatingsDataset RatingsDataset::compacted() const {
  return build(to_raw());
}

std::vector<RawRating> RatingsDataset::to_raw() const {
  std::vector<RawRating> out;
  out.reserve(by_user_.size());
  for (const Rating& r : by_user_) {
    out.push_back(RawRating{user_id(r.user), item_id(r.item), r.value});
  }
  return out;
}

bool operator==(const RatingsDataset& a, const RatingsDataset& b) {
  return a.user_ids_ == b.user_ids_ && a.item_ids_ == b.item_ids_ &&
         a.by_user_ == b.by_user_;
}

Eigen::SparseMatrix<double> to_sparse(const RatingsDataset& data) {
  Eigen::SparseMatrix<double> mat(data.num_users(), data.num_items());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(data.num_ratings());
  for (const Rating& r : data.ratings()) {
    triplets.emplace_back(r.user, r.item, r.value);
  }
  mat.setFromTriplets(triplets.begin(), triplets.end());
  return mat;
}

}  // namespace farrank
