#include "farrank/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "farrank/error.hpp"
#include "farrank/report.hpp"

namespace farrank {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw_io("cannot open " + path.string() + " for writing");
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool skippable(const std::string& line) {
  return line.empty() || line.front() == '#';
}

std::vector<std::string> split_fields(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  if (delimiter == ' ') {
    std::istringstream ss(line);
    std::string field;
    while (ss >> field) fields.push_back(field);
    return fields;
  }
  std::string::size_type start = 0;
  while (true) {
    auto end = line.find(delimiter, start);
    fields.push_back(line.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return fields;
}

double parse_double(const std::string& text, const std::filesystem::path& path,
                    std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw_data(path.string() + " line " + std::to_string(line_no) +
               ": cannot parse number '" + text + "'");
  }
  return value;
}

// 17 significant digits round-trips any double exactly.
std::string format_score(double value) {
  char buf[64];
  auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (ec != std::errc{}) throw_data("failed to format score");
  return std::string(buf, ptr);
}

}  // namespace

RatingsDataset load_ratings(const std::filesystem::path& path,
                            const RatingsFileSpec& spec, IngestStats* stats) {
  auto in = open_input(path);
  const int needed =
      std::max({spec.user_column, spec.item_column, spec.rating_column}) + 1;
  std::vector<RawRating> triples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (skippable(line)) continue;
    auto fields = split_fields(line, spec.delimiter);
    if (static_cast<int>(fields.size()) < needed) {
      throw_data(path.string() + " line " + std::to_string(line_no) +
                 ": expected at least " + std::to_string(needed) + " columns, got " +
                 std::to_string(fields.size()));
    }
    double value = parse_double(fields[spec.rating_column], path, line_no);
    if (!std::isfinite(value)) {
      throw_data(path.string() + " line " + std::to_string(line_no) +
                 ": rating is not finite");
    }
    if (value < 0.0 && !spec.clamp_negative) {
      throw_data(path.string() + " line " + std::to_string(line_no) +
                 ": negative rating " + fields[spec.rating_column]);
    }
    triples.push_back(
        RawRating{fields[spec.user_column], fields[spec.item_column], value});
  }
  return RatingsDataset::build(triples, spec.clamp_negative, stats);
}

void save_ratings(const RatingsDataset& data, const std::filesystem::path& path,
                  char delimiter) {
  auto out = open_output(path);
  for (const Rating& r : data.ratings()) {
    out << data.user_id(r.user) << delimiter << data.item_id(r.item) << delimiter
        << format_double(r.value) << '\n';
  }
  if (!out) throw_io("failed writing " + path.string());
}

ProviderCatalog load_provider_map(const std::filesystem::path& path, char delimiter) {
  auto in = open_input(path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (skippable(line)) continue;
    auto fields = split_fields(line, delimiter);
    if (fields.size() < 2) {
      throw_data(path.string() + " line " + std::to_string(line_no) +
                 ": expected item and provider columns");
    }
    pairs.emplace_back(fields[0], fields[1]);
  }
  if (pairs.empty()) {
    throw_data(path.string() + ": provider map is empty");
  }
  return ProviderCatalog::from_pairs(pairs);
}

void save_provider_map(const ProviderCatalog& catalog,
                       const std::filesystem::path& path, char delimiter) {
  auto out = open_output(path);
  for (const std::string& item : catalog.items()) {
    for (int p : catalog.item_providers(item)) {
      out << item << delimiter << catalog.provider_id(p) << '\n';
    }
  }
  if (!out) throw_io("failed writing " + path.string());
}

std::vector<double> load_provider_weights(const std::filesystem::path& path,
                                          const ProviderCatalog& catalog,
                                          char delimiter) {
  auto in = open_input(path);
  std::vector<double> weights(static_cast<std::size_t>(catalog.num_providers()), 0.0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (skippable(line)) continue;
    auto fields = split_fields(line, delimiter);
    if (fields.size() < 2) {
      throw_data(path.string() + " line " + std::to_string(line_no) +
                 ": expected provider and weight columns");
    }
    auto p = catalog.provider_index(fields[0]);
    if (!p) {
      throw_data(path.string() + " line " + std::to_string(line_no) +
                 ": unknown provider '" + fields[0] + "'");
    }
    double w = parse_double(fields[1], path, line_no);
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw_data(path.string() + " line " + std::to_string(line_no) +
                 ": weight must be finite and non-negative");
    }
    weights[static_cast<std::size_t>(*p)] = w;
  }
  double sum = 0.0;
  for (double w : weights) sum += w;
  if (sum <= 0.0) throw_data(path.string() + ": provider weights sum to zero");
  for (double& w : weights) w /= sum;
  return weights;
}

int TransactionTable::attribute_index(std::string_view name) const {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i] == name) return static_cast<int>(i);
  }
  return -1;
}

TransactionTable load_transactions(const std::filesystem::path& path, char delimiter,
                                   std::string_view user_column) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (skippable(line)) continue;
    header = split_fields(line, delimiter);
    break;
  }
  if (header.empty()) throw_data(path.string() + ": missing header row");

  int user_col = -1;
  TransactionTable table;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == user_column) {
      user_col = static_cast<int>(i);
    } else {
      table.attributes.push_back(header[i]);
    }
  }
  if (user_col < 0) {
    throw_data(path.string() + ": header has no '" + std::string(user_column) +
               "' column");
  }

  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (skippable(line)) continue;
    auto fields = split_fields(line, delimiter);
    if (fields.size() != header.size()) {
      throw_data(path.string() + " line " + std::to_string(line_no) + ": expected " +
                 std::to_string(header.size()) + " columns, got " +
                 std::to_string(fields.size()));
    }
    table.users.push_back(fields[static_cast<std::size_t>(user_col)]);
    std::vector<std::string> row;
    row.reserve(table.attributes.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (static_cast<int>(i) != user_col) row.push_back(std::move(fields[i]));
    }
    table.values.push_back(std::move(row));
  }
  return table;
}

std::vector<ScoredList> import_rankings(const std::filesystem::path& path,
                                        char delimiter) {
  auto in = open_input(path);
  std::vector<std::string> order;
  StringMap<std::vector<ScoredEntry>> per_user;
  StringMap<std::size_t> seen_pairs;  // "user\x1fitem" -> line
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (skippable(line)) continue;
    auto fields = split_fields(line, delimiter);
    if (fields.size() < 3) {
      throw_data(path.string() + " line " + std::to_string(line_no) +
                 ": expected user, item and score columns");
    }
    double score = parse_double(fields[2], path, line_no);
    if (!std::isfinite(score)) {
      throw_data(path.string() + " line " + std::to_string(line_no) +
                 ": score is not finite");
    }
    std::string key = fields[0] + '\x1f' + fields[1];
    if (auto [it, inserted] = seen_pairs.emplace(key, line_no); !inserted) {
      throw_data(path.string() + " line " + std::to_string(line_no) +
                 ": duplicate ranking entry for (" + fields[0] + ", " + fields[1] +
                 "), first seen on line " + std::to_string(it->second));
    }
    auto it = per_user.find(fields[0]);
    if (it == per_user.end()) {
      order.push_back(fields[0]);
      it = per_user.emplace(fields[0], std::vector<ScoredEntry>{}).first;
    }
    it->second.push_back(ScoredEntry{fields[1], score});
  }
  std::vector<ScoredList> lists;
  lists.reserve(order.size());
  for (const std::string& user : order) {
    lists.push_back(ScoredList::from_unsorted(user, std::move(per_user[user])));
  }
  return lists;
}

void export_rankings(std::span<const ScoredList> lists,
                     const std::filesystem::path& path, char delimiter) {
  auto out = open_output(path);
  for (const ScoredList& list : lists) {
    for (const ScoredEntry& e : list.entries()) {
      out << list.user() << delimiter << e.item << delimiter << format_score(e.score)
          << '\n';
    }
  }
  if (!out) throw_io("failed writing " + path.string());
}

}  // namespace farrank
