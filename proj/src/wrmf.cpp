#include "farrank/wrmf.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "farrank/error.hpp"
#include "farrank/rng.hpp"

namespace farrank {

namespace {

struct Observed {
  std::vector<std::size_t> offsets;  // per row, size+1
  std::vector<int> cols;
  std::vector<double> confidence;  // 1 + alpha * r
};

Observed collect(const RatingsDataset& data, double alpha, bool by_item) {
  const int rows = by_item ? data.num_items() : data.num_users();
  Observed obs;
  obs.offsets.assign(static_cast<std::size_t>(rows) + 1, 0);
  for (const Rating& r : data.ratings()) {
    if (r.value <= 0.0) continue;
    ++obs.offsets[static_cast<std::size_t>(by_item ? r.item : r.user) + 1];
  }
  for (std::size_t i = 1; i < obs.offsets.size(); ++i) {
    obs.offsets[i] += obs.offsets[i - 1];
  }
  obs.cols.resize(obs.offsets.back());
  obs.confidence.resize(obs.offsets.back());
  std::vector<std::size_t> cursor(obs.offsets.begin(), obs.offsets.end() - 1);
  for (const Rating& r : data.ratings()) {
    if (r.value <= 0.0) continue;
    const auto row = static_cast<std::size_t>(by_item ? r.item : r.user);
    obs.cols[cursor[row]] = by_item ? r.user : r.item;
    obs.confidence[cursor[row]] = 1.0 + alpha * r.value;
    ++cursor[row];
  }
  return obs;
}

// Solves every row of `target` against the fixed factor matrix `other`;
// only observed entries carry extra confidence, so each system is the
// shared Gram plus a low-rank correction over that row's observations.
void solve_side(Eigen::MatrixXd& target, const Eigen::MatrixXd& other,
                const Observed& obs, double regularization) {
  const auto f = other.cols();
  const Eigen::MatrixXd gram = other.transpose() * other;
  Eigen::MatrixXd a(f, f);
  Eigen::VectorXd b(f);
  for (Eigen::Index row = 0; row < target.rows(); ++row) {
    a = gram;
    a.diagonal().array() += regularization;
    b.setZero();
    for (std::size_t s = obs.offsets[static_cast<std::size_t>(row)];
         s < obs.offsets[static_cast<std::size_t>(row) + 1]; ++s) {
      const auto y = other.row(obs.cols[s]).transpose();
      const double c = obs.confidence[s];
      a.noalias() += (c - 1.0) * y * y.transpose();
      b.noalias() += c * y;
    }
    target.row(row) = a.ldlt().solve(b).transpose();
  }
}

// Full weighted objective via the Gram identity: the sum of squared
// predictions over all pairs collapses to x' (Y'Y) x per user, and the
// observed cells swap their unit-confidence term for the weighted one.
double objective(const Eigen::MatrixXd& users, const Eigen::MatrixXd& items,
                 const Observed& by_user, double regularization) {
  const Eigen::MatrixXd gram = items.transpose() * items;
  double total = 0.0;
  for (Eigen::Index u = 0; u < users.rows(); ++u) {
    total += users.row(u) * gram * users.row(u).transpose();
    for (std::size_t s = by_user.offsets[static_cast<std::size_t>(u)];
         s < by_user.offsets[static_cast<std::size_t>(u) + 1]; ++s) {
      const double pred = users.row(u).dot(items.row(by_user.cols[s]));
      const double err = 1.0 - pred;
      total += by_user.confidence[s] * err * err - pred * pred;
    }
  }
  total += regularization * (users.squaredNorm() + items.squaredNorm());
  return total;
}

}  // namespace

FactorModel train_wrmf(const RatingsDataset& train, int factors,
                       double regularization, double alpha, int iterations,
                       std::uint64_t seed) {
  if (factors < 1) throw_data("factor count must be at least 1");
  if (iterations < 1) throw_data("iteration count must be at least 1");
  if (!(regularization >= 0.0)) throw_data("regularization must be non-negative");
  if (!(alpha >= 0.0)) throw_data("confidence weight must be non-negative");
  if (train.num_ratings() == 0) throw_data("cannot train on an empty dataset");

  FactorModel model;
  model.regularization = regularization;
  model.alpha = alpha;
  model.user_factors.resize(train.num_users(), factors);
  model.item_factors.resize(train.num_items(), factors);
  Rng rng(mix_seed(seed, "wrmf-init"));
  for (Eigen::Index r = 0; r < model.user_factors.rows(); ++r) {
    for (Eigen::Index c = 0; c < factors; ++c) {
      model.user_factors(r, c) = rng.uniform() * 0.1;
    }
  }
  for (Eigen::Index r = 0; r < model.item_factors.rows(); ++r) {
    for (Eigen::Index c = 0; c < factors; ++c) {
      model.item_factors(r, c) = rng.uniform() * 0.1;
    }
  }

  const Observed by_user = collect(train, alpha, false);
  const Observed by_item = collect(train, alpha, true);

  model.objective_history.reserve(static_cast<std::size_t>(iterations));
  for (int sweep = 0; sweep < iterations; ++sweep) {
    solve_side(model.user_factors, model.item_factors, by_user, regularization);
    solve_side(model.item_factors, model.user_factors, by_item, regularization);
    const double loss = objective(model.user_factors, model.item_factors, by_user,
                                  regularization);
    if (!std::isfinite(loss)) throw_data("factorization diverged");
    model.objective_history.push_back(loss);
  }
  return model;
}

}  // namespace farrank
