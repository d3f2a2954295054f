#include "farrank/experiment.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "farrank/error.hpp"
#include "farrank/io.hpp"
#include "farrank/knn.hpp"
#include "farrank/metrics.hpp"
#include "farrank/recommend.hpp"
#include "farrank/rerank.hpp"
#include "farrank/rng.hpp"
#include "farrank/sweep.hpp"
#include "farrank/transform.hpp"
#include "farrank/wrmf.hpp"

namespace farrank {

namespace {

constexpr std::string_view kVersion = "1.0.0";

struct Ingested {
  RatingsDataset data;
  ProviderCatalog catalog;
};

Ingested ingest(const ExperimentConfig& config) {
  Ingested result;
  if (config.data_kind == "transactions") {
    const TransactionTable table =
        load_transactions(config.data_path, config.delimiter, config.tx_user_column);
    PseudoItemResult built =
        build_pseudo_items(table, config.tx_grouping, config.tx_provider_attribute,
                           config.tx_amount_attribute, config.tx_bins);
    result.data = std::move(built.ratings);
    result.catalog = std::move(built.catalog);
  } else {
    RatingsFileSpec spec;
    spec.delimiter = config.delimiter;
    spec.user_column = config.user_column;
    spec.item_column = config.item_column;
    spec.rating_column = config.rating_column;
    spec.clamp_negative = config.clamp_negative;
    result.data = load_ratings(config.data_path, spec);
  }

  if (config.k_core > 0) {
    result.data = k_core_filter(result.data, config.k_core);
    if (result.data.num_ratings() == 0) {
      throw_data("degree filtering removed every rating");
    }
  }

  if (config.data_kind != "transactions") {
    if (config.provider_source == "file") {
      result.catalog = load_provider_map(config.provider_path, config.delimiter);
    } else {
      result.catalog = assign_synthetic_providers(result.data, config.provider_count,
                                                  config.provider_p, *config.seed);
    }
  }

  for (int i = 0; i < result.data.num_items(); ++i) {
    if (!result.catalog.contains_item(result.data.item_id(i))) {
      throw_data("item '" + result.data.item_id(i) + "' has no provider assignment");
    }
  }
  return result;
}

bool has_positive_rating(const RatingsDataset& data, int user) {
  for (const Rating& r : data.by_user(user)) {
    if (r.value > 0.0) return true;
  }
  return false;
}

struct FoldLists {
  std::vector<ScoredList> base;
  std::int64_t skipped = 0;
};

// Base rankings for every evaluable test user of one fold: a user needs
// held-out ratings and either a trainable profile or an imported list.
FoldLists fold_rankings(const FoldSplit& fold, const ExperimentConfig& config,
                        const StringMap<const ScoredList*>& imported) {
  FoldLists out;
  const RatingsDataset& universe = fold.train;

  const bool import_mode = config.recommender == "import";
  std::optional<NeighborhoodModel> knn;
  std::optional<FactorModel> wrmf;
  if (config.recommender == "item_knn") {
    knn = train_item_knn(fold.train, config.neighborhood);
  } else if (config.recommender == "user_knn") {
    knn = train_user_knn(fold.train, config.neighborhood);
  } else if (config.recommender == "wrmf") {
    wrmf = train_wrmf(fold.train, config.factors, config.regularization,
                      config.alpha, config.iterations,
                      mix_seed(*config.seed, static_cast<std::uint64_t>(fold.fold_id)));
  }

  for (int u = 0; u < universe.num_users(); ++u) {
    if (fold.test.user_degree(u) == 0) continue;
    const std::string& id = universe.user_id(u);
    if (import_mode) {
      const auto it = imported.find(id);
      if (it == imported.end()) {
        ++out.skipped;
        continue;
      }
      out.base.push_back(normalize_scores(truncate_list(*it->second, config.z)));
      continue;
    }
    if (!has_positive_rating(fold.train, u)) {
      ++out.skipped;
      continue;
    }
    ScoredList list = knn ? recommend(*knn, fold.train, id, config.z)
                          : recommend(*wrmf, fold.train, id, config.z);
    out.base.push_back(normalize_scores(std::move(list)));
  }
  return out;
}

std::string delimiter_name(char delimiter) {
  switch (delimiter) {
    case '\t': return "tab";
    case ' ': return "space";
    case ',': return "comma";
    case ';': return "semicolon";
    default: return std::string(1, delimiter);
  }
}

// The manifest doubles as a runnable configuration: comments carry the
// version and run facts, the key = value lines echo every effective
// setting.
void write_manifest(std::ostream& out, const ExperimentConfig& config,
                    const ExperimentResult& result) {
  out << "# farrank " << kVersion << "\n";
  out << "# folds evaluated: " << result.report.folds << "\n";
  out << "# skipped users: " << result.report.skipped_users << "\n";
  out << "# lambda_star: " << format_double(result.pick.lambda) << "\n";
  out << "data.kind = " << config.data_kind << "\n";
  out << "data.path = " << config.data_path << "\n";
  out << "data.delimiter = " << delimiter_name(config.delimiter) << "\n";
  out << "data.k_core = " << config.k_core << "\n";
  if (config.data_kind == "transactions") {
    out << "transactions.user_column = " << config.tx_user_column << "\n";
    out << "transactions.grouping = ";
    for (std::size_t i = 0; i < config.tx_grouping.size(); ++i) {
      if (i > 0) out << ",";
      out << config.tx_grouping[i];
    }
    out << "\n";
    out << "transactions.provider_attribute = " << config.tx_provider_attribute
        << "\n";
    if (config.tx_amount_attribute) {
      out << "transactions.amount_attribute = " << *config.tx_amount_attribute
          << "\n";
      out << "transactions.bins = " << config.tx_bins << "\n";
    }
  } else {
    out << "data.user_column = " << config.user_column << "\n";
    out << "data.item_column = " << config.item_column << "\n";
    out << "data.rating_column = " << config.rating_column << "\n";
    out << "data.clamp_negative = " << (config.clamp_negative ? "true" : "false")
        << "\n";
    out << "provider.source = " << config.provider_source << "\n";
    if (config.provider_source == "file") {
      out << "provider.path = " << config.provider_path << "\n";
    } else {
      out << "provider.count = " << config.provider_count << "\n";
      out << "provider.p = " << format_double(config.provider_p) << "\n";
    }
  }
  if (!config.weights_path.empty()) {
    out << "provider.weights_path = " << config.weights_path << "\n";
  }
  out << "recommender.kind = " << config.recommender << "\n";
  if (config.recommender == "item_knn" || config.recommender == "user_knn") {
    out << "recommender.neighborhood = " << config.neighborhood << "\n";
  } else if (config.recommender == "wrmf") {
    out << "recommender.factors = " << config.factors << "\n";
    out << "recommender.regularization = " << format_double(config.regularization)
        << "\n";
    out << "recommender.alpha = " << format_double(config.alpha) << "\n";
    out << "recommender.iterations = " << config.iterations << "\n";
  } else if (config.recommender == "import") {
    out << "recommender.path = " << config.rankings_path << "\n";
  }
  out << "rerank.z = " << config.z << "\n";
  out << "rerank.k = " << config.k << "\n";
  out << "rerank.mode = " << to_string(config.mode) << "\n";
  out << "rerank.normalize_tolerance = "
      << (config.normalize_tolerance ? "true" : "false") << "\n";
  if (config.cold_tolerance) {
    out << "rerank.cold_tolerance = " << format_double(*config.cold_tolerance)
        << "\n";
  }
  out << "sweep.lambda_max = " << format_double(config.lambda_max) << "\n";
  out << "sweep.lambda_step = " << format_double(config.lambda_step) << "\n";
  out << "eval.budget = " << format_double(config.budget) << "\n";
  out << "eval.relevance_threshold = " << format_double(config.relevance_threshold)
      << "\n";
  out << "cv.folds = " << config.folds << "\n";
  out << "seed = " << *config.seed << "\n";
  out << "output.dir = " << config.output_dir << "\n";
}

void write_outputs(const ExperimentResult& result, const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  const std::vector<fs::path> paths = {result.report_path, result.summary_path,
                                       result.histogram_path, result.manifest_path};
  try {
    auto open = [](const fs::path& p) {
      std::ofstream out(p);
      if (!out) throw_io("cannot write '" + p.string() + "'");
      return out;
    };
    auto close = [](std::ofstream& out, const fs::path& p) {
      out.flush();
      if (!out) throw_io("failed writing '" + p.string() + "'");
    };
    {
      auto out = open(result.report_path);
      write_report_csv(result.report, out);
      close(out, result.report_path);
    }
    {
      auto out = open(result.summary_path);
      write_summary_csv(result.pick, out);
      close(out, result.summary_path);
    }
    {
      const SweepRow* star = nullptr;
      for (const SweepRow& row : result.report.rows) {
        if (row.lambda == result.pick.lambda) star = &row;
      }
      if (!star) {
        throw Error(ErrorCode::internal, "selected lambda missing from the sweep");
      }
      auto out = open(result.histogram_path);
      write_histogram_csv(result.report, *star, out);
      close(out, result.histogram_path);
    }
    {
      auto out = open(result.manifest_path);
      write_manifest(out, config, result);
      close(out, result.manifest_path);
    }
  } catch (...) {
    for (const fs::path& p : paths) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    throw;
  }
}

}  // namespace

std::vector<double> compute_tolerances(const RatingsDataset& train,
                                       const ProviderCatalog& catalog,
                                       std::span<const std::string> users,
                                       const ExperimentConfig& config) {
  std::vector<double> out;
  out.reserve(users.size());
  if (config.mode == RerankMode::far) {
    out.assign(users.size(), 1.0);
    return out;
  }
  const int c = catalog.num_providers();
  for (const std::string& user : users) {
    const Eigen::VectorXd interest = compute_interest(train, catalog, user);
    if (interest.size() == 0) {
      if (config.cold_tolerance) {
        out.push_back(*config.cold_tolerance);
      } else {
        out.push_back(config.normalize_tolerance
                          ? 1.0
                          : std::log2(static_cast<double>(c)));
      }
      continue;
    }
    double tau = compute_tolerance(interest, c);
    if (config.normalize_tolerance) tau = normalize_tolerance(tau, c);
    out.push_back(tau);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, int workers) {
  {
    const std::vector<std::string> violations = validate_config(config);
    if (!violations.empty()) {
      std::string joined = "invalid configuration: ";
      for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i > 0) joined += "; ";
        joined += violations[i];
      }
      throw_config(joined);
    }
  }

  Ingested ingested = ingest(config);
  const RatingsDataset& data = ingested.data;
  const ProviderCatalog& catalog = ingested.catalog;

  RerankParams params;
  params.lambda = 0.0;
  params.k = config.k;
  params.mode = config.mode;
  if (!config.weights_path.empty()) {
    params.provider_weights =
        load_provider_weights(config.weights_path, catalog, config.delimiter);
  }
  validate(params, catalog);

  const std::vector<double> grid = lambda_grid(config.lambda_max, config.lambda_step);

  std::vector<ScoredList> imported_storage;
  StringMap<const ScoredList*> imported;
  if (config.recommender == "import") {
    imported_storage = import_rankings(config.rankings_path, config.delimiter);
    for (const ScoredList& list : imported_storage) {
      imported.emplace(list.user(), &list);
    }
  }

  const std::vector<FoldSplit> folds = split_folds(data, config.folds, *config.seed);

  SweepReport total;
  total.dataset = config.data_path;
  total.recommender = config.recommender;
  total.mode = std::string(to_string(config.mode));
  total.providers = catalog.providers();
  total.rows.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    total.rows[g].lambda = grid[g];
    total.rows[g].provider_counts.assign(
        static_cast<std::size_t>(catalog.num_providers()), 0);
  }

  // Folds run concurrently, each sweeping with its share of the worker
  // budget; results land in per-fold slots so aggregation below is
  // order-fixed no matter how threads interleave.
  struct FoldOutcome {
    std::int64_t skipped = 0;
    bool evaluated = false;
    SweepReport report;
  };
  std::vector<FoldOutcome> outcomes(folds.size());
  const auto fold_workers = std::max<std::size_t>(
      1, std::min<std::size_t>(folds.size(),
                               workers < 1 ? 1 : static_cast<std::size_t>(workers)));
  const int sweep_workers =
      std::max(1, (workers < 1 ? 1 : workers) / static_cast<int>(fold_workers));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(fold_workers);
  auto work = [&](std::size_t slot) {
    try {
      while (true) {
        const std::size_t f = next.fetch_add(1);
        if (f >= folds.size()) break;
        const FoldSplit& fold = folds[f];
        FoldLists lists = fold_rankings(fold, config, imported);
        outcomes[f].skipped = lists.skipped;
        if (lists.base.empty()) continue;
        std::vector<std::string> users;
        users.reserve(lists.base.size());
        for (const ScoredList& list : lists.base) users.push_back(list.user());
        const std::vector<double> tolerances =
            compute_tolerances(fold.train, catalog, users, config);
        outcomes[f].report =
            lambda_sweep(lists.base, tolerances, fold.test, catalog, params, grid,
                         config.relevance_threshold, sweep_workers);
        outcomes[f].evaluated = true;
      }
    } catch (...) {
      failures[slot] = std::current_exception();
    }
  };
  if (fold_workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(fold_workers);
    for (std::size_t t = 0; t < fold_workers; ++t) pool.emplace_back(work, t);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  int contributing = 0;
  for (const FoldOutcome& outcome : outcomes) {
    total.skipped_users += outcome.skipped;
    if (!outcome.evaluated) continue;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      total.rows[g].mean_ndcg += outcome.report.rows[g].mean_ndcg;
      total.rows[g].apcr += outcome.report.rows[g].apcr;
      for (std::size_t d = 0; d < total.rows[g].provider_counts.size(); ++d) {
        total.rows[g].provider_counts[d] += outcome.report.rows[g].provider_counts[d];
      }
    }
    ++contributing;
  }
  if (contributing == 0) throw_data("no evaluable users in any fold");
  for (SweepRow& row : total.rows) {
    row.mean_ndcg /= contributing;
    row.apcr /= contributing;
  }
  total.folds = contributing;

  ExperimentResult result;
  result.report = std::move(total);
  result.pick = apcr_at_ndcg_budget(result.report, config.budget);

  const std::filesystem::path dir = config.output_dir;
  std::filesystem::create_directories(dir);
  result.report_path = dir / "report.csv";
  result.summary_path = dir / "summary.csv";
  result.histogram_path =
      dir / ("histogram_lambda_" + format_double(result.pick.lambda) + ".csv");
  result.manifest_path = dir / "manifest.txt";
  write_outputs(result, config);
  return result;
}

}  // namespace farrank
