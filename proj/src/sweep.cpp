#include "farrank/sweep.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "farrank/error.hpp"
#include "farrank/rerank.hpp"

namespace farrank {

std::vector<double> lambda_grid(double lambda_max, double step) {
  if (!std::isfinite(lambda_max) || lambda_max < 0.0) {
    throw_data("grid maximum must be non-negative and finite");
  }
  if (!std::isfinite(step) || step < 1e-6) {
    throw_data("grid step must be at least 1e-6");
  }
  const auto step_u = std::llround(step * 1e6);
  const auto max_u = std::llround(lambda_max * 1e6);
  if (max_u / step_u >= 1000000) throw_data("grid would exceed a million points");
  std::vector<double> grid;
  for (long long v = 0; v <= max_u; v += step_u) {
    grid.push_back(static_cast<double>(v) / 1e6);
  }
  return grid;
}

namespace {

struct UserState {
  std::vector<double> scores;
  std::vector<std::span<const int>> providers;
  std::vector<char> relevant;  // per list position
  double idcg = 0.0;           // 0 marks a user outside the quality mean
  double tolerance = 1.0;
};

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw_data("grid must contain at least one point");
  if (grid.front() != 0.0) throw_data("grid must start at zero");
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!std::isfinite(grid[g]) || grid[g] < 0.0) {
      throw_data("grid points must be non-negative and finite");
    }
    if (g > 0 && grid[g] <= grid[g - 1]) throw_data("grid must be strictly ascending");
  }
}

SweepRow evaluate_point(double lambda, std::span<const UserState> users,
                        std::span<const double> weights, int providers, int k) {
  SweepRow row;
  row.lambda = lambda;
  row.provider_counts.assign(static_cast<std::size_t>(providers), 0);
  double ndcg_sum = 0.0;
  std::size_t ndcg_users = 0;
  std::int64_t covered = 0;
  for (const UserState& u : users) {
    CoverageState state(providers);
    const std::vector<int> picks =
        greedy_select(u.scores, u.providers, k, lambda * u.tolerance, weights, state);
    covered += state.num_covered();
    for (int pos : picks) {
      for (int d : u.providers[static_cast<std::size_t>(pos)]) {
        ++row.provider_counts[static_cast<std::size_t>(d)];
      }
    }
    if (u.idcg > 0.0) {
      double dcg = 0.0;
      for (std::size_t j = 0; j < picks.size(); ++j) {
        if (u.relevant[static_cast<std::size_t>(picks[j])]) {
          dcg += 1.0 / std::log2(static_cast<double>(j) + 2.0);
        }
      }
      ndcg_sum += dcg / u.idcg;
      ++ndcg_users;
    }
  }
  row.mean_ndcg = ndcg_users > 0 ? ndcg_sum / static_cast<double>(ndcg_users) : 0.0;
  row.apcr = static_cast<double>(covered) /
             (static_cast<double>(providers) * static_cast<double>(users.size()));
  return row;
}

}  // namespace

SweepReport lambda_sweep(std::span<const ScoredList> base,
                         std::span<const double> tolerances,
                         const RatingsDataset& test,
                         const ProviderCatalog& catalog,
                         const RerankParams& params, std::span<const double> grid,
                         double relevance_threshold, int workers) {
  if (base.empty()) throw_data("sweep needs at least one base list");
  check_grid(grid);
  validate(params, catalog);
  if (params.mode == RerankMode::pfar && tolerances.size() != base.size()) {
    throw_data("personalized sweep needs one tolerance per list");
  }
  const std::vector<double> weights = effective_weights(params, catalog);
  const int c = catalog.num_providers();

  std::vector<UserState> users(base.size());
  for (std::size_t u = 0; u < base.size(); ++u) {
    const ScoredList& list = base[u];
    UserState& state = users[u];
    state.scores.reserve(list.size());
    state.providers.reserve(list.size());
    state.relevant.assign(list.size(), 0);
    state.tolerance = params.mode == RerankMode::pfar ? tolerances[u] : 1.0;
    if (!std::isfinite(state.tolerance) || state.tolerance < 0.0) {
      throw_data("tolerance must be non-negative and finite");
    }
    const std::optional<int> uidx = test.user_index(list.user());
    std::size_t relevant_held = 0;
    if (uidx) {
      for (const Rating& r : test.by_user(*uidx)) {
        if (r.value >= relevance_threshold) ++relevant_held;
      }
    }
    for (std::size_t pos = 0; pos < list.size(); ++pos) {
      const ScoredEntry& e = list.entries()[pos];
      if (!catalog.contains_item(e.item)) {
        throw_data("item '" + e.item + "' has no provider assignment");
      }
      state.scores.push_back(e.score);
      state.providers.push_back(catalog.item_providers(e.item));
      if (uidx && relevant_held > 0) {
        const std::optional<int> iidx = test.item_index(e.item);
        if (iidx) {
          const std::optional<double> held = test.rating(*uidx, *iidx);
          if (held && *held >= relevance_threshold) {
            state.relevant[pos] = 1;
          }
        }
      }
    }
    const auto ideal = std::min<std::size_t>(relevant_held,
                                             static_cast<std::size_t>(params.k));
    for (std::size_t j = 0; j < ideal; ++j) {
      state.idcg += 1.0 / std::log2(static_cast<double>(j) + 2.0);
    }
  }

  SweepReport report;
  report.mode = std::string(to_string(params.mode));
  report.providers = catalog.providers();
  report.rows.resize(grid.size());

  const auto thread_count = std::max<std::size_t>(
       1, std::min<std::size_t>(grid.size(),
                                workers < 1 ? 1 : static_cast<std::size_t>(workers)));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(thread_count);
  auto work = [&](std::size_t slot) {
    try {
      while (true) {
        const std::size_t g = next.fetch_add(1);
        if (g >= grid.size()) break;
        report.rows[g] = evaluate_point(grid[g], users, weights, c, params.k);
      }
    } catch (...) {
      failures[slot] = std::current_exception();
    }
  };
  if (thread_count == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(work, t);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return report;
}

BudgetPick apcr_at_ndcg_budget(const SweepReport& report, double budget) {
  if (!(budget >= 0.0 && budget < 1.0)) {
    throw_data("accuracy budget must lie in [0, 1)");
  }
  const SweepRow& base = report.base_row();
  const double floor = (1.0 - budget) * base.mean_ndcg;
  const SweepRow* best = &base;
  for (const SweepRow& row : report.rows) {
    if (row.mean_ndcg < floor) continue;
    if (row.apcr > best->apcr) best = &row;
  }
  BudgetPick pick;
  pick.budget = budget;
  pick.lambda = best->lambda;
  pick.apcr = best->apcr;
  pick.relative_gain =
      base.apcr > 0.0 ? (best->apcr - base.apcr) / base.apcr : 0.0;
  return pick;
}

}  // namespace farrank
