#include <doctest.h>

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "farrank/catalog.hpp"
#include "farrank/error.hpp"
#include "farrank/metrics.hpp"
#include "farrank/ranking.hpp"
#include "farrank/report.hpp"
#include "farrank/rerank.hpp"
#include "farrank/sweep.hpp"
#include "support/checks.hpp"
#include "support/synthetic_data.hpp"

using namespace farrank;
using testsupport::capture;
using testsupport::catalog_from;
using testsupport::dataset_from;

TEST_SUITE("ranking quality") {

TEST_CASE("a hit in second place scores the reciprocal log discount") {
  const auto test = dataset_from({{"u", "y", 4.0}});
  const std::vector<std::string> ranked = {"x", "y"};
  const auto value = ndcg_at_k(ranked, test, "u", 2);
  REQUIRE(value.has_value());
  CHECK(*value == doctest::Approx(0.6309297535714574).epsilon(1e-12));
}

TEST_CASE("a perfect head scores one") {
  const auto test = dataset_from({{"u", "y", 4.0}});
  const std::vector<std::string> ranked = {"y", "x"};
  CHECK(ndcg_at_k(ranked, test, "u", 2) == 1.0);
}

TEST_CASE("the ideal ranking is truncated at the depth") {
  // Two relevant held-out items but depth one: a single hit is ideal.
  const auto test = dataset_from({{"u", "y", 4.0}, {"u", "z", 3.0}});
  const std::vector<std::string> ranked = {"y"};
  CHECK(ndcg_at_k(ranked, test, "u", 1) == 1.0);
}

TEST_CASE("an all-relevant list scores one at any length") {
  const auto test = dataset_from({{"u", "a", 4.0}, {"u", "b", 3.0}});
  const std::vector<std::string> ranked = {"a", "b"};
  CHECK(ndcg_at_k(ranked, test, "u", 5) == 1.0);
}

TEST_CASE("positions past the depth earn nothing") {
  const auto test = dataset_from({{"u", "y", 4.0}});
  const std::vector<std::string> ranked = {"x", "y"};
  const auto value = ndcg_at_k(ranked, test, "u", 1);
  REQUIRE(value.has_value());
  CHECK(*value == 0.0);
}

TEST_CASE("the relevance threshold filters weak held-out ratings") {
  const auto test = dataset_from({{"u", "y", 4.0}, {"u", "z", 2.0}});
  const std::vector<std::string> ranked = {"z", "y"};
  const auto value = ndcg_at_k(ranked, test, "u", 2, 3.0);
  REQUIRE(value.has_value());
  // Only y clears the bar, and it sits in second place.
  CHECK(*value == doctest::Approx(0.6309297535714574).epsilon(1e-12));
}

TEST_CASE("users without relevant held-out items have no value") {
  const auto test = dataset_from({{"u", "y", 2.0}});
  const std::vector<std::string> ranked = {"y"};
  CHECK_FALSE(ndcg_at_k(ranked, test, "ghost", 2).has_value());
  CHECK_FALSE(ndcg_at_k(ranked, test, "u", 2, 3.0).has_value());
  CHECK(ndcg_at_k(ranked, test, "u", 2, 2.0).has_value());
}

TEST_CASE("the depth is validated") {
  const auto test = dataset_from({{"u", "y", 2.0}});
  const std::vector<std::string> ranked = {"y"};
  CHECK(capture([&] { ndcg_at_k(ranked, test, "u", 0); })
            .contains("evaluation depth must be at least 1"));
}

}  // TEST_SUITE ranking quality

TEST_SUITE("provider coverage") {

namespace {

ProviderCatalog ten_providers() {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int d = 0; d < 10; ++d) {
    pairs.emplace_back("i" + std::to_string(d), "d" + std::to_string(d));
  }
  return ProviderCatalog::from_pairs(pairs);
}

}  // namespace

TEST_CASE("coverage averages the per-list provider fraction") {
  const auto catalog = ten_providers();
  std::vector<RerankedList> lists;
  lists.emplace_back("u1", std::vector<std::string>{"i0", "i1"},
                     std::vector<int>{0, 1});
  lists.emplace_back("u2", std::vector<std::string>{"i0"},
                     std::vector<int>{0, 1, 2, 3, 4, 5});
  CHECK(apcr(lists, catalog) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("coverage needs at least one list") {
  const auto catalog = ten_providers();
  const std::vector<RerankedList> none;
  CHECK(capture([&] { apcr(none, catalog); })
            .contains("coverage rate needs at least one list"));
}

TEST_CASE("histogram counts slots once per owner") {
  const auto catalog =
      catalog_from({{"a", "d1"}, {"b", "d1"}, {"b", "d2"}, {"c", "d3"}});
  std::vector<RerankedList> lists;
  lists.emplace_back("u1", std::vector<std::string>{"a", "b"}, std::vector<int>{0, 1});
  lists.emplace_back("u2", std::vector<std::string>{"b", "c"},
                     std::vector<int>{0, 1, 2});
  const auto counts = provider_histogram(lists, catalog);
  CHECK(counts == std::vector<std::int64_t>{3, 2, 1});

  // Total slots equal the summed owner counts of every listed item.
  std::int64_t total = 0;
  for (auto v : counts) total += v;
  CHECK(total == 6);
}

TEST_CASE("histogram rejects unowned items and tolerates empty input") {
  const auto catalog = catalog_from({{"a", "d1"}});
  std::vector<RerankedList> lists;
  lists.emplace_back("u", std::vector<std::string>{"ghost"}, std::vector<int>{});
  CHECK(capture([&] { provider_histogram(lists, catalog); })
            .contains("item 'ghost' has no provider assignment"));
  const std::vector<RerankedList> none;
  CHECK(provider_histogram(none, catalog) == std::vector<std::int64_t>{0});
}

}  // TEST_SUITE provider coverage

TEST_SUITE("lambda grid") {

TEST_CASE("points land on exact multiples of the step") {
  const auto grid = lambda_grid(2.0, 0.05);
  REQUIRE(grid.size() == 41);
  CHECK(grid.front() == 0.0);
  CHECK(grid[3] == 0.15);
  CHECK(grid.back() == 2.0);

  const auto partial = lambda_grid(0.1, 0.03);
  REQUIRE(partial.size() == 4);
  CHECK(partial.back() == 0.09);

  CHECK(lambda_grid(0.0, 0.5) == std::vector<double>{0.0});
}

TEST_CASE("grid parameters are validated") {
  CHECK(capture([] { lambda_grid(-1.0, 0.1); })
            .contains("grid maximum must be non-negative and finite"));
  CHECK(capture([] { lambda_grid(std::numeric_limits<double>::infinity(), 0.1); })
            .contains("grid maximum must be non-negative and finite"));
  CHECK(capture([] { lambda_grid(1.0, 1e-7); })
            .contains("grid step must be at least 1e-6"));
  CHECK(capture([] { lambda_grid(10.0, 1e-6); })
            .contains("grid would exceed a million points"));
}

}  // TEST_SUITE lambda grid

TEST_SUITE("trade-off sweep") {

namespace {

struct SweepWorld {
  std::vector<ScoredList> base;
  RatingsDataset test;
  ProviderCatalog catalog;
};

SweepWorld sweep_world() {
  SweepWorld w;
  w.base.push_back(ScoredList::from_sorted(
      "u1", {{"a", 0.9}, {"b", 0.8}, {"c", 0.7}}));
  w.base.push_back(ScoredList::from_sorted(
      "u2", {{"c", 0.9}, {"a", 0.5}, {"b", 0.4}}));
  w.test = dataset_from({{"u1", "c", 4.0}, {"u2", "a", 4.0}});
  w.catalog = catalog_from({{"a", "d1"}, {"b", "d1"}, {"c", "d2"}});
  return w;
}

}  // namespace

TEST_CASE("each row equals the direct rerank-and-measure path") {
  const auto w = sweep_world();
  RerankParams params;
  params.k = 2;
  params.mode = RerankMode::far;
  const std::vector<double> grid = {0.0, 0.5, 1.0};
  const auto report = lambda_sweep(w.base, {}, w.test, w.catalog, params, grid, 0.0, 1);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.mode == "FAR");
  CHECK(report.providers == std::vector<std::string>{"d1", "d2"});

  for (std::size_t g = 0; g < grid.size(); ++g) {
    RerankParams point = params;
    point.lambda = grid[g];
    std::vector<RerankedList> reranked;
    double ndcg_sum = 0.0;
    std::size_t engaged = 0;
    for (const ScoredList& list : w.base) {
      reranked.push_back(rerank(list, point, 1.0, w.catalog));
      const auto q =
          ndcg_at_k(reranked.back().items(), w.test, list.user(), params.k);
      if (q) {
        ndcg_sum += *q;
        ++engaged;
      }
    }
    const SweepRow& row = report.rows[g];
    CHECK(row.lambda == grid[g]);
    CHECK(row.mean_ndcg ==
          doctest::Approx(ndcg_sum / static_cast<double>(engaged)).epsilon(1e-12));
    CHECK(row.apcr == apcr(reranked, w.catalog));
    CHECK(row.provider_counts == provider_histogram(reranked, w.catalog));
  }
}

TEST_CASE("personal tolerances freeze individual users") {
  const auto w = sweep_world();
  RerankParams params;
  params.k = 2;
  params.mode = RerankMode::pfar;
  const std::vector<double> tolerances = {1.0, 0.0};
  const std::vector<double> grid = {0.0, 1.0};
  const auto report =
      lambda_sweep(w.base, tolerances, w.test, w.catalog, params, grid, 0.0, 1);

  RerankParams point = params;
  point.lambda = 1.0;
  std::vector<RerankedList> reranked;
  for (std::size_t u = 0; u < w.base.size(); ++u) {
    reranked.push_back(rerank(w.base[u], point, tolerances[u], w.catalog));
  }
  CHECK(report.rows[1].apcr == apcr(reranked, w.catalog));
  CHECK(report.rows[1].provider_counts == provider_histogram(reranked, w.catalog));
  // u2's zero tolerance keeps the base head [c, a]; u1 diversifies.
  CHECK(reranked[1].items()[0] == "c");
  CHECK(reranked[1].items()[1] == "a");
  CHECK(reranked[0].items()[1] == "c");
}

TEST_CASE("worker count does not change the report") {
  const auto w = sweep_world();
  RerankParams params;
  params.k = 2;
  const auto grid = lambda_grid(1.0, 0.1);
  const auto serial = lambda_sweep(w.base, {}, w.test, w.catalog, params, grid, 0.0, 1);
  const auto parallel =
      lambda_sweep(w.base, {}, w.test, w.catalog, params, grid, 0.0, 4);
  CHECK(serial == parallel);
}

TEST_CASE("sweep inputs are validated") {
  const auto w = sweep_world();
  RerankParams params;
  params.k = 2;
  const std::vector<double> grid = {0.0, 1.0};

  const std::vector<ScoredList> empty;
  CHECK(capture([&] { lambda_sweep(empty, {}, w.test, w.catalog, params, grid, 0.0, 1); })
            .contains("sweep needs at least one base list"));

  const std::vector<double> no_zero = {0.5, 1.0};
  CHECK(capture([&] {
          lambda_sweep(w.base, {}, w.test, w.catalog, params, no_zero, 0.0, 1);
        }).contains("grid must start at zero"));

  const std::vector<double> unsorted = {0.0, 1.0, 0.5};
  CHECK(capture([&] {
          lambda_sweep(w.base, {}, w.test, w.catalog, params, unsorted, 0.0, 1);
        }).contains("strictly ascending"));

  const std::vector<double> bad = {0.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK(capture([&] {
          lambda_sweep(w.base, {}, w.test, w.catalog, params, bad, 0.0, 1);
        }).contains("non-negative and finite"));

  const std::vector<double> none;
  CHECK(capture([&] {
          lambda_sweep(w.base, {}, w.test, w.catalog, params, none, 0.0, 1);
        }).contains("grid must contain at least one point"));

  RerankParams personalized = params;
  personalized.mode = RerankMode::pfar;
  const std::vector<double> short_tol = {1.0};
  CHECK(capture([&] {
          lambda_sweep(w.base, short_tol, w.test, w.catalog, personalized, grid, 0.0, 1);
        }).contains("one tolerance per list"));

  const std::vector<double> bad_tol = {1.0, -2.0};
  CHECK(capture([&] {
          lambda_sweep(w.base, bad_tol, w.test, w.catalog, personalized, grid, 0.0, 1);
        }).contains("tolerance must be non-negative and finite"));
}

}  // TEST_SUITE trade-off sweep

TEST_SUITE("budget selection") {

namespace {

SweepReport curve() {
  SweepReport report;
  report.providers = {"d1", "d2"};
  report.rows = {
      {0.0, 0.50, 0.40, {}},
      {0.5, 0.48, 0.60, {}},
      {1.0, 0.47, 0.70, {}},
      {2.0, 0.40, 0.80, {}},
  };
  return report;
}

}  // namespace

TEST_CASE("picks the best coverage inside the accuracy floor") {
  const auto pick = apcr_at_ndcg_budget(curve(), 0.05);
  // The floor is 0.475, which admits the first two rows only.
  CHECK(pick.lambda == 0.5);
  CHECK(pick.apcr == 0.60);
  CHECK(pick.budget == 0.05);
  CHECK(pick.relative_gain == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("coverage ties keep the smaller lambda") {
  SweepReport report;
  report.rows = {
      {0.0, 0.5, 0.6, {}},
      {1.0, 0.5, 0.6, {}},
  };
  const auto pick = apcr_at_ndcg_budget(report, 0.0);
  CHECK(pick.lambda == 0.0);
  CHECK(pick.relative_gain == 0.0);
}

TEST_CASE("the base row always stays eligible") {
  SweepReport report;
  report.rows = {
      {0.0, 0.5, 0.4, {}},
      {1.0, 0.6, 0.3, {}},
  };
  const auto pick = apcr_at_ndcg_budget(report, 0.0);
  CHECK(pick.lambda == 0.0);
  CHECK(pick.apcr == 0.4);
}

TEST_CASE("zero base coverage reports zero gain") {
  SweepReport report;
  report.rows = {
      {0.0, 0.5, 0.0, {}},
      {1.0, 0.5, 0.2, {}},
  };
  const auto pick = apcr_at_ndcg_budget(report, 0.1);
  CHECK(pick.apcr == 0.2);
  CHECK(pick.relative_gain == 0.0);
}

TEST_CASE("budget bounds and base row presence are enforced") {
  CHECK(capture([&] { apcr_at_ndcg_budget(curve(), 1.0); })
            .contains("accuracy budget must lie in [0, 1)"));
  CHECK(capture([&] { apcr_at_ndcg_budget(curve(), -0.1); })
            .contains("accuracy budget must lie in [0, 1)"));
  SweepReport broken;
  broken.rows = {{0.5, 0.5, 0.5, {}}};
  CHECK(capture([&] { apcr_at_ndcg_budget(broken, 0.1); })
            .contains("no lambda = 0 base row"));
  CHECK(capture([&] { apcr_at_ndcg_budget(SweepReport{}, 0.1); })
            .contains("no lambda = 0 base row"));
}

}  // TEST_SUITE budget selection

TEST_SUITE("report files") {

TEST_CASE("numbers print in their shortest exact form") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.05) == "0.05");
  CHECK(format_double(0.15) == "0.15");
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1e-06) == "1e-06");
}

TEST_CASE("trade-off table layout") {
  SweepReport report;
  report.providers = {"A", "B"};
  report.rows = {
      {0.0, 0.5, 0.25, {3, 1}},
      {0.05, 0.45, 0.5, {2, 2}},
  };
  std::ostringstream out;
  write_report_csv(report, out);
  CHECK(out.str() ==
        "lambda,mean_ndcg,apcr,A,B\n"
        "0,0.5,0.25,3,1\n"
        "0.05,0.45,0.5,2,2\n");
}

TEST_CASE("summary row carries the gain in percent") {
  BudgetPick pick;
  pick.budget = 0.05;
  pick.lambda = 0.5;
  pick.apcr = 0.6;
  pick.relative_gain = 0.5;
  std::ostringstream out;
  write_summary_csv(pick, out);
  CHECK(out.str() ==
        "budget,lambda_star,apcr,relative_gain_pct\n"
        "0.05,0.5,0.6,50\n");
}

TEST_CASE("histogram lists one provider per row") {
  SweepReport report;
  report.providers = {"A", "B"};
  report.rows = {{0.0, 0.5, 0.25, {3, 1}}};
  std::ostringstream out;
  write_histogram_csv(report, report.rows[0], out);
  CHECK(out.str() ==
        "provider,count\n"
        "A,3\n"
        "B,1\n");
}

}  // TEST_SUITE report files
