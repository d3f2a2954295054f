#include "farrank/knn.hpp"

#include <algorithm>
#include <cmath>

#include "farrank/error.hpp"

namespace farrank {

namespace {

Eigen::SparseMatrix<double, Eigen::RowMajor> build_matrix(const RatingsDataset& data,
                                                          bool transpose) {
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> triplets;
  triplets.reserve(data.num_ratings());
  for (const Rating& r : data.ratings()) {
    if (r.value <= 0.0) continue;
    if (transpose) {
      triplets.emplace_back(r.item, r.user, r.value);
    } else {
      triplets.emplace_back(r.user, r.item, r.value);
    }
  }
  const int rows = transpose ? data.num_items() : data.num_users();
  const int cols = transpose ? data.num_users() : data.num_items();
  Eigen::SparseMatrix<double, Eigen::RowMajor> m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

// Accumulates dot products of `entity` against every other row of
// `profiles` by walking its ratings through the transposed matrix, then
// keeps the strongest `neighborhood` cosines.
void top_neighbors(const Eigen::SparseMatrix<double, Eigen::RowMajor>& profiles,
                   const Eigen::SparseMatrix<double, Eigen::RowMajor>& transposed,
                   const std::vector<double>& norms, int entity, int neighborhood,
                   std::vector<double>& dot, std::vector<SimEntry>& out) {
  out.clear();
  std::vector<int> touched;
  for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(profiles, entity);
       it; ++it) {
    const int axis = static_cast<int>(it.col());
    const double v = it.value();
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator jt(transposed, axis);
         jt; ++jt) {
      const int other = static_cast<int>(jt.col());
      if (dot[static_cast<std::size_t>(other)] == 0.0) touched.push_back(other);
      dot[static_cast<std::size_t>(other)] += v * jt.value();
    }
  }
  for (int other : touched) {
    double& d = dot[static_cast<std::size_t>(other)];
    if (other != entity && d > 0.0 && norms[static_cast<std::size_t>(other)] > 0.0 &&
        norms[static_cast<std::size_t>(entity)] > 0.0) {
      const double sim = d / (norms[static_cast<std::size_t>(entity)] *
                              norms[static_cast<std::size_t>(other)]);
      if (sim > 0.0) out.push_back(SimEntry{other, sim});
    }
    d = 0.0;
  }
  auto order = [](const SimEntry& a, const SimEntry& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return a.index < b.index;
  };
  const auto keep = static_cast<std::size_t>(neighborhood);
  if (out.size() > keep) {
    std::nth_element(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(keep),
                     out.end(), order);
    out.resize(keep);
  }
  std::sort(out.begin(), out.end(), order);
}

}  // namespace

NeighborhoodModel NeighborhoodModel::build(const RatingsDataset& data, Kind kind,
                                           int neighborhood) {
  if (neighborhood < 1) throw_data("neighborhood size must be at least 1");
  if (data.num_ratings() == 0) throw_data("cannot train on an empty dataset");

  NeighborhoodModel model;
  model.kind_ = kind;
  model.neighborhood_ = neighborhood;
  model.num_users_ = data.num_users();
  model.num_items_ = data.num_items();
  model.by_user_ = build_matrix(data, false);
  model.by_item_ = build_matrix(data, true);

  const bool item_kind = kind == Kind::item;
  const auto& profiles = item_kind ? model.by_item_ : model.by_user_;
  const auto& transposed = item_kind ? model.by_user_ : model.by_item_;
  const int entities = item_kind ? model.num_items_ : model.num_users_;

  model.norms_.resize(static_cast<std::size_t>(entities));
  for (int e = 0; e < entities; ++e) {
    model.norms_[static_cast<std::size_t>(e)] = profiles.row(e).norm();
  }

  std::vector<double> dot(static_cast<std::size_t>(entities), 0.0);
  std::vector<SimEntry> scratch;
  model.neighbor_offsets_.assign(1, 0);
  for (int e = 0; e < entities; ++e) {
    top_neighbors(profiles, transposed, model.norms_, e, neighborhood, dot, scratch);
    model.neighbor_pool_.insert(model.neighbor_pool_.end(), scratch.begin(),
                                scratch.end());
    model.neighbor_offsets_.push_back(model.neighbor_pool_.size());
  }

  if (item_kind) {
    // Group (owner, sim) pairs by the neighbor they point at.
    std::vector<std::size_t> counts(static_cast<std::size_t>(entities) + 1, 0);
    for (const SimEntry& s : model.neighbor_pool_) {
      ++counts[static_cast<std::size_t>(s.index) + 1];
    }
    for (std::size_t j = 1; j < counts.size(); ++j) counts[j] += counts[j - 1];
    model.reverse_offsets_ = counts;
    model.reverse_pool_.resize(model.neighbor_pool_.size());
    std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
    for (int owner = 0; owner < entities; ++owner) {
      for (std::size_t s = model.neighbor_offsets_[static_cast<std::size_t>(owner)];
           s < model.neighbor_offsets_[static_cast<std::size_t>(owner) + 1]; ++s) {
        const SimEntry& entry = model.neighbor_pool_[s];
        model.reverse_pool_[cursor[static_cast<std::size_t>(entry.index)]++] =
            SimEntry{owner, entry.sim};
      }
    }
  }
  return model;
}

double NeighborhoodModel::similarity(int a, int b) const {
  const int entities = kind_ == Kind::item ? num_items_ : num_users_;
  if (a < 0 || a >= entities || b < 0 || b >= entities) {
    throw_data("similarity index out of range");
  }
  const auto& profiles = kind_ == Kind::item ? by_item_ : by_user_;
  const double na = norms_[static_cast<std::size_t>(a)];
  const double nb = norms_[static_cast<std::size_t>(b)];
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  const double d = profiles.row(a).dot(profiles.row(b));
  return d / (na * nb);
}

std::span<const SimEntry> NeighborhoodModel::neighbors(int index) const {
  const int entities = kind_ == Kind::item ? num_items_ : num_users_;
  if (index < 0 || index >= entities) throw_data("neighbor index out of range");
  const std::size_t lo = neighbor_offsets_[static_cast<std::size_t>(index)];
  const std::size_t hi = neighbor_offsets_[static_cast<std::size_t>(index) + 1];
  return {neighbor_pool_.data() + lo, hi - lo};
}

Eigen::VectorXd NeighborhoodModel::score_all(int user) const {
  if (user < 0 || user >= num_users_) throw_data("user index out of range");
  Eigen::VectorXd num = Eigen::VectorXd::Zero(num_items_);
  Eigen::VectorXd den = Eigen::VectorXd::Zero(num_items_);
  if (kind_ == Kind::item) {
    // score(u,i) averages the user's ratings over the top neighbors of i
    // that the user has rated; the reverse lists enumerate exactly the
    // pairs (i, sim) each rated item participates in.
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(by_user_, user);
         it; ++it) {
      const auto j = static_cast<std::size_t>(it.col());
      for (std::size_t s = reverse_offsets_[j]; s < reverse_offsets_[j + 1]; ++s) {
        const SimEntry& entry = reverse_pool_[s];
        num[entry.index] += entry.sim * it.value();
        den[entry.index] += entry.sim;
      }
    }
  } else {
    for (const SimEntry& entry : neighbors(user)) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(by_user_,
                                                                          entry.index);
           it; ++it) {
        num[it.col()] += entry.sim * it.value();
        den[it.col()] += entry.sim;
      }
    }
  }
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(num_items_);
  for (int i = 0; i < num_items_; ++i) {
    if (den[i] > 0.0) scores[i] = num[i] / den[i];
  }
  return scores;
}

NeighborhoodModel train_item_knn(const RatingsDataset& train, int neighborhood) {
  return NeighborhoodModel::build(train, NeighborhoodModel::Kind::item, neighborhood);
}

NeighborhoodModel train_user_knn(const RatingsDataset& train, int neighborhood) {
  return NeighborhoodModel::build(train, NeighborhoodModel::Kind::user, neighborhood);
}

}  // namespace farrank
