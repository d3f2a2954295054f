#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>

namespace farrank {

// Transparent hasher so string_view keys probe string-keyed maps without
// allocating.
struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
};
template <typename V>
using StringMap = std::unordered_map<std::string, V, StringHash, std::equal_to<>>;

// One observed interaction, in dense index space.
struct Rating {
  int user = 0;
  int item = 0;
  double value = 0.0;

  friend bool operator==(const Rating&, const Rating&) = default;
};

struct RawRating {
  std::string user;
  std::string item;
  double value = 0.0;
};

struct IngestStats {
  std::size_t duplicates_dropped = 0;
  std::size_t negatives_clamped = 0;
};

// Immutable sparse rating matrix over opaque string identifiers.
// Identifiers are interned to dense indices in first-appearance order;
// the remap tables are part of the dataset so output always speaks the
// original identifiers. A dataset derived from another (fold splits)
// keeps the parent's index universe, so an entity may have zero ratings
// while still being addressable.
class RatingsDataset {
public:
  RatingsDataset() = default;

  // Builds a dataset whose universe is exactly the entities present in
  // `triples`. Duplicate (user, item) pairs keep the last occurrence.
  // Negative values throw unless `clamp_negative`, which clamps to 0.
  // Non-finite values always throw.
  static RatingsDataset build(const std::vector<RawRating>& triples,
                              bool clamp_negative = false,
                              IngestStats* stats = nullptr);

  int num_users() const { return static_cast<int>(user_ids_.size()); }
  int num_items() const { return static_cast<int>(item_ids_.size()); }
  std::size_t num_ratings() const { return by_user_.size(); }
  bool empty() const { return by_user_.empty(); }

  // All ratings sorted by (user, item).
  std::span<const Rating> ratings() const { return by_user_; }

  std::span<const Rating> by_user(int user) const;
  std::span<const Rating> by_item(int item) const;

  std::size_t user_degree(int user) const { return by_user(user).size(); }
  std::size_t item_degree(int item) const { return by_item(item).size(); }

  const std::string& user_id(int user) const { return user_ids_.at(user); }
  const std::string& item_id(int item) const { return item_ids_.at(item); }
  std::optional<int> user_index(std::string_view id) const;
  std::optional<int> item_index(std::string_view id) const;

  std::optional<double> rating(int user, int item) const;

  // Same universe (identifier tables and indices), different triples.
  // `triples` must reference valid indices; used by fold splitting so
  // train/test halves stay index-compatible.
  RatingsDataset with_ratings(std::vector<Rating> triples) const;

  // Shrinks the universe to entities that still carry ratings and
  // re-interns identifiers; used after degree filtering.
  RatingsDataset compacted() const;

  std::vector<RawRating> to_raw() const;

  friend bool operator==(const RatingsDataset&, const RatingsDataset&);

private:
  void index_ratings();

  std::vector<std::string> user_ids_;
  std::vector<std::string> item_ids_;
  StringMap<int> user_index_;
  StringMap<int> item_index_;
  std::vector<Rating> by_user_;        // sorted (user, item)
  std::vector<Rating> by_item_;        // sorted (item, user)
  std::vector<std::size_t> user_offsets_;
  std::vector<std::size_t> item_offsets_;
};

// Dense-index sparse view (m x n), users as rows.
Eigen::SparseMatrix<double> to_sparse(const RatingsDataset& data);

}  // namespace farrank
