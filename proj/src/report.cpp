#include "farrank/report.hpp"

#include <charconv>

#include "farrank/error.hpp"

namespace farrank {

const SweepRow& SweepReport::base_row() const {
  if (rows.empty() || rows.front().lambda != 0.0) {
    throw_data("sweep report has no lambda = 0 base row");
  }
  return rows.front();
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw_data("failed to format numeric value");
  return std::string(buf, ptr);
}

void write_report_csv(const SweepReport& report, std::ostream& out) {
  out << "lambda,mean_ndcg,apcr";
  for (const std::string& p : report.providers) out << ',' << p;
  out << '\n';
  for (const SweepRow& row : report.rows) {
    out << format_double(row.lambda) << ',' << format_double(row.mean_ndcg) << ','
        << format_double(row.apcr);
    for (std::int64_t count : row.provider_counts) out << ',' << count;
    out << '\n';
  }
}

void write_summary_csv(const BudgetPick& pick, std::ostream& out) {
  out << "budget,lambda_star,apcr,relative_gain_pct\n";
  out << format_double(pick.budget) << ',' << format_double(pick.lambda) << ','
      << format_double(pick.apcr) << ',' << format_double(pick.relative_gain * 100.0)
      << '\n';
}

void write_histogram_csv(const SweepReport& report, const SweepRow& row,
                         std::ostream& out) {
  out << "provider,count\n";
  for (std::size_t p = 0; p < report.providers.size(); ++p) {
    std::int64_t count = p < row.provider_counts.size() ? row.provider_counts[p] : 0;
    out << report.providers[p] << ',' << count << '\n';
  }
}

}  // namespace farrank
