#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <span>
#include <vector>

#include "farrank/dataset.hpp"

namespace farrank {

struct SimEntry {
  int index;
  double sim;
};

// Cosine neighborhood model over either the item axis or the user axis of
// a rating matrix. Zero-valued ratings are treated as unobserved.
class NeighborhoodModel {
 public:
  enum class Kind { item, user };

  Kind kind() const { return kind_; }
  int neighborhood_size() const { return neighborhood_; }
  int num_users() const { return num_users_; }
  int num_items() const { return num_items_; }

  // Exact cosine between two entities of the model's kind, computed from
  // the stored ratings. Entities with an all-zero profile get 0.
  double similarity(int a, int b) const;

  // Top neighbors of one entity: positive similarity only, ordered by
  // similarity descending with ties broken toward the smaller index.
  std::span<const SimEntry> neighbors(int index) const;

  // Predicted score for every item, for one user of the training matrix.
  Eigen::VectorXd score_all(int user) const;

 private:
  friend NeighborhoodModel train_item_knn(const RatingsDataset&, int);
  friend NeighborhoodModel train_user_knn(const RatingsDataset&, int);
  static NeighborhoodModel build(const RatingsDataset& data, Kind kind,
                                 int neighborhood);

  Kind kind_ = Kind::item;
  int neighborhood_ = 0;
  int num_users_ = 0;
  int num_items_ = 0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> by_user_;  // users x items
  Eigen::SparseMatrix<double, Eigen::RowMajor> by_item_;  // items x users
  std::vector<double> norms_;                 // one per entity of kind_
  std::vector<SimEntry> neighbor_pool_;       // top lists, concatenated
  std::vector<std::size_t> neighbor_offsets_; // per entity, size+1
  // For item models: entries (i, sim) grouped by neighbor j, so a user's
  // rated items index straight into the lists that mention them.
  std::vector<SimEntry> reverse_pool_;
  std::vector<std::size_t> reverse_offsets_;
};

NeighborhoodModel train_item_knn(const RatingsDataset& train, int neighborhood);
NeighborhoodModel train_user_knn(const RatingsDataset& train, int neighborhood);

}  // namespace farrank
