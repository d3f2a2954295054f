#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "farrank/catalog.hpp"
#include "farrank/error.hpp"
#include "farrank/ranking.hpp"
#include "farrank/rerank.hpp"
#include "support/checks.hpp"
#include "support/synthetic_data.hpp"

using namespace farrank;
using testsupport::capture;
using testsupport::catalog_from;
using testsupport::dataset_from;

namespace {

template <typename T>
std::vector<T> materialize(std::span<const T> s) {
  return std::vector<T>(s.begin(), s.end());
}

}  // namespace

TEST_SUITE("coverage state") {

TEST_CASE("adding owners marks them once") {
  CoverageState state(5);
  CHECK(state.size() == 5);
  CHECK(state.num_covered() == 0);
  const std::vector<int> first = {1, 3};
  const std::vector<int> second = {3, 0};
  state.add(first);
  state.add(second);
  CHECK(state.num_covered() == 3);
  CHECK(state.covers(0));
  CHECK(state.covers(1));
  CHECK_FALSE(state.covers(2));
  CHECK(state.covers(3));
  CHECK(state.covered_indices() == std::vector<int>{0, 1, 3});
}

TEST_CASE("at least one provider slot is required") {
  CHECK(capture([] { CoverageState state(0); })
            .contains("coverage needs at least one provider"));
}

}  // TEST_SUITE coverage state

TEST_SUITE("interest profiles") {

TEST_CASE("provider shares split the positive rating mass once per owner") {
  const auto catalog = catalog_from({{"v1", "d1"}, {"v1", "d2"}, {"v2", "d1"}});
  const auto train = dataset_from({{"u", "v1", 2.0}, {"u", "v2", 2.0}});
  const auto interest = compute_interest(train, catalog, "u");
  REQUIRE(interest.size() == 2);
  // v1 feeds both providers, v2 only the first: d1 holds 4 of 6 units.
  CHECK(interest[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(interest[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(interest.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unowned items and non-positive ratings contribute nothing") {
  const auto catalog = catalog_from({{"v1", "d1"}, {"v2", "d2"}});
  const auto train = dataset_from({{"u", "v1", 3.0},
                                   {"u", "stray", 50.0},
                                   {"u", "v2", 0.0}});
  const auto interest = compute_interest(train, catalog, "u");
  REQUIRE(interest.size() == 2);
  CHECK(interest[0] == 1.0);
  CHECK(interest[1] == 0.0);
}

TEST_CASE("a user with no owned mass comes back empty") {
  const auto catalog = catalog_from({{"v1", "d1"}});
  const auto train = dataset_from({{"u", "stray", 5.0}, {"w", "v1", 1.0}});
  CHECK(compute_interest(train, catalog, "u").size() == 0);
  CHECK(compute_interest(train, catalog, "w").size() == 1);
}

TEST_CASE("unknown users are rejected") {
  const auto catalog = catalog_from({{"v1", "d1"}});
  const auto train = dataset_from({{"u", "v1", 1.0}});
  CHECK(capture([&] { compute_interest(train, catalog, "nobody"); })
            .contains("unknown user identifier 'nobody'"));
}

}  // TEST_SUITE interest profiles

TEST_SUITE("tolerance") {

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("entropy oracles") {
  CHECK(compute_tolerance(vec({0.5, 0.25, 0.25, 0.0}), 4) == 1.5);
  CHECK(compute_tolerance(vec({0.5, 0.5}), 2) == 1.0);
  CHECK(compute_tolerance(vec({0.25, 0.25, 0.25, 0.25}), 4) == 2.0);
  CHECK(compute_tolerance(vec({1.0, 0.0, 0.0}), 3) == 0.0);
  CHECK(compute_tolerance(vec({0.7, 0.3}), 2) ==
        doctest::Approx(0.8812908992306927).epsilon(1e-12));
}

TEST_CASE("cold users take the fallback or the maximum entropy") {
  CHECK(compute_tolerance(Eigen::VectorXd(), 8) == 3.0);
  CHECK(compute_tolerance(Eigen::VectorXd(), 8, 0.42) == 0.42);
  // The fallback is used verbatim even above the entropy cap.
  CHECK(compute_tolerance(Eigen::VectorXd(), 2, 7.5) == 7.5);
  CHECK(compute_tolerance(Eigen::VectorXd(), 1) == 0.0);
}

TEST_CASE("interest vectors are validated") {
  CHECK(capture([] { compute_tolerance(vec({0.5, 0.5}), 3); })
            .contains("does not match the provider count"));
  CHECK(capture([] { compute_tolerance(vec({1.5, -0.5}), 2); })
            .contains("non-negative and finite"));
  CHECK(capture([] { compute_tolerance(vec({0.4, 0.4}), 2); })
            .contains("sum to one"));
  CHECK(capture([] { compute_tolerance(Eigen::VectorXd(), 0); })
            .contains("at least one provider"));
}

TEST_CASE("normalization divides by the entropy cap") {
  CHECK(normalize_tolerance(1.5, 4) == 0.75);
  CHECK(normalize_tolerance(3.0, 8) == 1.0);
  CHECK(normalize_tolerance(0.0, 4) == 0.0);
  // One provider has cap zero; the scale collapses to one.
  CHECK(normalize_tolerance(0.0, 1) == 1.0);
  CHECK(capture([] { normalize_tolerance(1.0, 0); })
            .contains("at least one provider"));
}

}  // TEST_SUITE tolerance

TEST_SUITE("fairness bonus") {

TEST_CASE("uncovered owners contribute their weight") {
  const auto catalog = catalog_from(
      {{"i1", "d1"}, {"i1", "d2"}, {"i2", "d3"}, {"i3", "d4"}, {"i4", "d1"}});
  CoverageState state(4);
  const std::vector<int> d1 = {0};
  state.add(d1);
  const std::vector<double> uniform(4, 0.25);
  CHECK(fairness_bonus("i1", state, catalog, uniform) == 0.25);
  CHECK(fairness_bonus("i4", state, catalog, uniform) == 0.0);
  CHECK(fairness_bonus("i2", state, catalog, uniform) == 0.25);

  const std::vector<double> skewed = {0.4, 0.3, 0.2, 0.1};
  CHECK(fairness_bonus("i1", state, catalog, skewed) == 0.3);

  CoverageState empty(4);
  CHECK(fairness_bonus("i1", empty, catalog, skewed) ==
        doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("items outside the catalog are rejected") {
  const auto catalog = catalog_from({{"i1", "d1"}});
  CoverageState state(1);
  const std::vector<double> w = {1.0};
  CHECK(capture([&] { fairness_bonus("ghost", state, catalog, w); })
            .contains("item 'ghost' has no provider assignment"));
}

}  // TEST_SUITE fairness bonus

TEST_SUITE("greedy selection") {

TEST_CASE("the fairness term can promote a lower-scored item") {
  // a 0.9 {d1}, b 0.8 {d1}, c 0.7 {d2}, uniform weights 1/2.
  const std::vector<double> scores = {0.9, 0.8, 0.7};
  const std::vector<std::vector<int>> owners = {{0}, {0}, {1}};
  std::vector<std::span<const int>> spans(owners.begin(), owners.end());
  const std::vector<double> weights = {0.5, 0.5};

  CoverageState strong(2);
  CHECK(greedy_select(scores, spans, 2, 1.0, weights, strong) ==
        std::vector<int>{0, 2});
  CHECK(strong.num_covered() == 2);

  CoverageState weak(2);
  CHECK(greedy_select(scores, spans, 2, 0.1, weights, weak) ==
        std::vector<int>{0, 1});
  CHECK(weak.num_covered() == 1);

  CoverageState off(2);
  CHECK(greedy_select(scores, spans, 3, 0.0, weights, off) ==
        std::vector<int>{0, 1, 2});
}

TEST_CASE("exact ties go to the earlier position") {
  const std::vector<double> scores = {0.5, 0.5, 0.5};
  const std::vector<std::vector<int>> owners = {{0}, {0}, {0}};
  std::vector<std::span<const int>> spans(owners.begin(), owners.end());
  const std::vector<double> weights = {1.0};
  CoverageState state(1);
  CHECK(greedy_select(scores, spans, 2, 3.0, weights, state) ==
        std::vector<int>{0, 1});
}

TEST_CASE("a pre-covered provider grants no bonus") {
  const std::vector<double> scores = {0.9, 0.8};
  const std::vector<std::vector<int>> owners = {{0}, {1}};
  std::vector<std::span<const int>> spans(owners.begin(), owners.end());
  const std::vector<double> weights = {0.5, 0.5};
  CoverageState state(2);
  const std::vector<int> pre = {1};
  state.add(pre);
  // d2 is already covered, so b keeps its raw score and a still wins
  // despite the large multiplier favoring new providers.
  CHECK(greedy_select(scores, spans, 1, 10.0, weights, state) ==
        std::vector<int>{0});
}

TEST_CASE("mismatched spans are rejected") {
  const std::vector<double> scores = {0.5, 0.4};
  const std::vector<std::vector<int>> owners = {{0}};
  std::vector<std::span<const int>> spans(owners.begin(), owners.end());
  const std::vector<double> weights = {1.0};
  CoverageState state(1);
  CHECK(capture([&] { greedy_select(scores, spans, 1, 0.0, weights, state); })
            .contains("scores and provider lists differ in length"));
}

TEST_CASE("agrees with a brute-force oracle on random instances") {
  testsupport::Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = testsupport::random_instance(rng);
    const int c = inst.catalog.num_providers();
    std::vector<double> scores;
    for (const auto& e : inst.list.entries()) scores.push_back(e.score);
    std::vector<std::span<const int>> spans(inst.owners.begin(), inst.owners.end());
    std::vector<double> weights(static_cast<std::size_t>(c),
                                1.0 / static_cast<double>(c));
    const double lambda_tau = rng.uniform() * 3.0;
    const int k = 1 + static_cast<int>(rng.bounded(inst.list.size()));
    CoverageState state(c);
    const auto got = greedy_select(scores, spans, k, lambda_tau, weights, state);
    const auto want =
        testsupport::oracle_greedy(scores, inst.owners, k, lambda_tau, weights);
    CHECK(got == want);
  }
}

}  // TEST_SUITE greedy selection

TEST_SUITE("list re-ranking") {

namespace {

ScoredList abc_list() {
  return ScoredList::from_sorted(
      "u", {{"a", 0.9}, {"b", 0.8}, {"c", 0.7}});
}

ProviderCatalog abc_catalog() {
  return catalog_from({{"a", "d1"}, {"b", "d1"}, {"c", "d2"}});
}

}  // namespace

TEST_CASE("uniform mode pins the tolerance to one") {
  RerankParams params;
  params.lambda = 1.0;
  params.k = 2;
  params.mode = RerankMode::far;
  // The supplied tolerance must be ignored: even zero keeps the
  // diversity term alive.
  const auto out = rerank(abc_list(), params, 0.0, abc_catalog());
  REQUIRE(out.items().size() == 2);
  CHECK(out.items()[0] == "a");
  CHECK(out.items()[1] == "c");
  CHECK(materialize(out.covered_providers()) == std::vector<int>{0, 1});

  const auto same = rerank(abc_list(), params, 0.37, abc_catalog());
  CHECK(same.items()[1] == "c");
}

TEST_CASE("personalized mode scales the term by the tolerance") {
  RerankParams params;
  params.lambda = 2.0;
  params.k = 2;
  params.mode = RerankMode::pfar;
  // lambda * tau = 1.0 reproduces the uniform pick.
  const auto diverse = rerank(abc_list(), params, 0.5, abc_catalog());
  CHECK(diverse.items()[1] == "c");
  // An intolerant user keeps the accuracy order.
  const auto narrow = rerank(abc_list(), params, 0.05, abc_catalog());
  CHECK(narrow.items()[1] == "b");
  CHECK(narrow.num_covered() == 1);
}

TEST_CASE("lambda zero reproduces the base order") {
  RerankParams params;
  params.lambda = 0.0;
  params.k = 3;
  const auto out = rerank(abc_list(), params, 1.0, abc_catalog());
  CHECK(materialize(out.items()) == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("skewed provider weights steer the bonus") {
  RerankParams params;
  params.lambda = 1.0;
  params.k = 2;
  params.mode = RerankMode::far;
  params.provider_weights = {0.9, 0.1};
  // d2's weight is too small to lift c over b once d1 is covered.
  const auto out = rerank(abc_list(), params, 1.0, abc_catalog());
  CHECK(out.items()[1] == "b");
}

TEST_CASE("multi-owner items cover every owner at once") {
  const auto catalog =
      catalog_from({{"a", "d1"}, {"a", "d2"}, {"b", "d3"}});
  const auto list = ScoredList::from_sorted("u", {{"a", 1.0}, {"b", 0.5}});
  RerankParams params;
  params.lambda = 0.0;
  params.k = 1;
  const auto out = rerank(list, params, 1.0, catalog);
  CHECK(out.num_covered() == 2);
  CHECK(materialize(out.covered_providers()) == std::vector<int>{0, 1});
}

TEST_CASE("inputs are validated") {
  const auto catalog = abc_catalog();
  RerankParams params;
  params.k = 2;

  CHECK(capture([&] { rerank(ScoredList{}, params, 1.0, catalog); })
            .contains("cannot rerank an empty list"));
  CHECK(capture([&] {
          rerank(abc_list(), params, std::numeric_limits<double>::quiet_NaN(),
                 catalog);
        }).contains("tolerance must be non-negative and finite"));
  CHECK(capture([&] { rerank(abc_list(), params, -0.5, catalog); })
            .contains("tolerance must be non-negative and finite"));

  RerankParams negative = params;
  negative.lambda = -1.0;
  CHECK(capture([&] { rerank(abc_list(), negative, 1.0, catalog); }).thrown);

  RerankParams shallow = params;
  shallow.k = 0;
  CHECK(capture([&] { rerank(abc_list(), shallow, 1.0, catalog); }).thrown);

  RerankParams misweighted = params;
  misweighted.provider_weights = {1.0};
  CHECK(capture([&] { rerank(abc_list(), misweighted, 1.0, catalog); }).thrown);

  const auto sparse_catalog = catalog_from({{"a", "d1"}});
  CHECK(capture([&] { rerank(abc_list(), params, 1.0, sparse_catalog); })
            .contains("item 'b' has no provider assignment"));
}

}  // TEST_SUITE list re-ranking
