#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace farrank {

// One evaluated grid point: metrics plus the per-provider
// recommendation histogram (multi-provider items count once per owner).
struct SweepRow {
  double lambda = 0.0;
  double mean_ndcg = 0.0;
  double apcr = 0.0;
  std::vector<std::int64_t> provider_counts;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

// Accuracy/fairness trade-off curve for one experiment configuration.
// Rows are sorted by lambda ascending; the first row is lambda = 0 and
// doubles as the base recommender's own metrics.
struct SweepReport {
  std::string dataset;
  std::string recommender;
  std::string mode;
  int folds = 1;
  std::vector<std::string> providers;  // histogram column labels
  std::vector<SweepRow> rows;
  std::int64_t skipped_users = 0;  // test users without usable rankings

  const SweepRow& base_row() const;

  friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

// Result of the accuracy-budget selection over a sweep.
struct BudgetPick {
  double budget = 0.0;
  double lambda = 0.0;
  double apcr = 0.0;
  double relative_gain = 0.0;
};

// Shortest round-trip decimal form, locale-independent.
std::string format_double(double value);

void write_report_csv(const SweepReport& report, std::ostream& out);
void write_summary_csv(const BudgetPick& pick, std::ostream& out);
void write_histogram_csv(const SweepReport& report, const SweepRow& row,
                         std::ostream& out);

}  // namespace farrank
