#include "farrank/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "farrank/error.hpp"

namespace farrank {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

struct Cursor {
  std::string_view origin;
  std::size_t line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw_config(std::string(origin) + ":" + std::to_string(line) + ": " + what);
  }
};

template <typename T>
T parse_number(std::string_view value, const Cursor& at, std::string_view key) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    at.fail("'" + std::string(key) + "' expects a number, got '" +
            std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view value, const Cursor& at, std::string_view key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  at.fail("'" + std::string(key) + "' expects true or false, got '" +
          std::string(value) + "'");
}

char parse_delimiter(std::string_view value, const Cursor& at) {
  if (value == "tab") return '\t';
  if (value == "space") return ' ';
  if (value == "comma") return ',';
  if (value == "semicolon") return ';';
  if (value.size() == 1) return value.front();
  at.fail("'data.delimiter' expects tab, space, comma, semicolon, or one character");
}

std::vector<std::string> parse_list(std::string_view value) {
  std::vector<std::string> out;
  while (!value.empty()) {
    const auto comma = value.find(',');
    const std::string_view part = trim(value.substr(0, comma));
    if (!part.empty()) out.emplace_back(part);
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view, const Cursor&)>;

const std::unordered_map<std::string_view, Setter>& setters() {
  static const std::unordered_map<std::string_view, Setter> table = {
      {"data.kind", [](auto& c, auto v, auto&) { c.data_kind = std::string(v); }},
      {"data.path", [](auto& c, auto v, auto&) { c.data_path = std::string(v); }},
      {"data.delimiter",
       [](auto& c, auto v, auto& at) { c.delimiter = parse_delimiter(v, at); }},
      {"data.user_column",
       [](auto& c, auto v, auto& at) {
         c.user_column = parse_number<int>(v, at, "data.user_column");
       }},
      {"data.item_column",
       [](auto& c, auto v, auto& at) {
         c.item_column = parse_number<int>(v, at, "data.item_column");
       }},
      {"data.rating_column",
       [](auto& c, auto v, auto& at) {
         c.rating_column = parse_number<int>(v, at, "data.rating_column");
       }},
      {"data.clamp_negative",
       [](auto& c, auto v, auto& at) {
         c.clamp_negative = parse_bool(v, at, "data.clamp_negative");
       }},
      {"data.k_core",
       [](auto& c, auto v, auto& at) {
         c.k_core = parse_number<int>(v, at, "data.k_core");
       }},
      {"transactions.user_column",
       [](auto& c, auto v, auto&) { c.tx_user_column = std::string(v); }},
      {"transactions.grouping",
       [](auto& c, auto v, auto&) { c.tx_grouping = parse_list(v); }},
      {"transactions.provider_attribute",
       [](auto& c, auto v, auto&) { c.tx_provider_attribute = std::string(v); }},
      {"transactions.amount_attribute",
       [](auto& c, auto v, auto&) { c.tx_amount_attribute = std::string(v); }},
      {"transactions.bins",
       [](auto& c, auto v, auto& at) {
         c.tx_bins = parse_number<int>(v, at, "transactions.bins");
       }},
      {"provider.source",
       [](auto& c, auto v, auto&) { c.provider_source = std::string(v); }},
      {"provider.path",
       [](auto& c, auto v, auto&) { c.provider_path = std::string(v); }},
      {"provider.count",
       [](auto& c, auto v, auto& at) {
         c.provider_count = parse_number<int>(v, at, "provider.count");
       }},
      {"provider.p",
       [](auto& c, auto v, auto& at) {
         c.provider_p = parse_number<double>(v, at, "provider.p");
       }},
      {"provider.weights_path",
       [](auto& c, auto v, auto&) { c.weights_path = std::string(v); }},
      {"recommender.kind",
       [](auto& c, auto v, auto&) { c.recommender = std::string(v); }},
      {"recommender.neighborhood",
       [](auto& c, auto v, auto& at) {
         c.neighborhood = parse_number<int>(v, at, "recommender.neighborhood");
       }},
      {"recommender.factors",
       [](auto& c, auto v, auto& at) {
         c.factors = parse_number<int>(v, at, "recommender.factors");
       }},
      {"recommender.regularization",
       [](auto& c, auto v, auto& at) {
         c.regularization = parse_number<double>(v, at, "recommender.regularization");
       }},
      {"recommender.alpha",
       [](auto& c, auto v, auto& at) {
         c.alpha = parse_number<double>(v, at, "recommender.alpha");
       }},
      {"recommender.iterations",
       [](auto& c, auto v, auto& at) {
         c.iterations = parse_number<int>(v, at, "recommender.iterations");
       }},
      {"recommender.path",
       [](auto& c, auto v, auto&) { c.rankings_path = std::string(v); }},
      {"rerank.z",
       [](auto& c, auto v, auto& at) { c.z = parse_number<int>(v, at, "rerank.z"); }},
      {"rerank.k",
       [](auto& c, auto v, auto& at) { c.k = parse_number<int>(v, at, "rerank.k"); }},
      {"rerank.mode",
       [](auto& c, auto v, auto& at) {
         const auto mode = parse_mode(v);
         if (!mode) at.fail("'rerank.mode' expects far or pfar");
         c.mode = *mode;
       }},
      {"rerank.normalize_tolerance",
       [](auto& c, auto v, auto& at) {
         c.normalize_tolerance = parse_bool(v, at, "rerank.normalize_tolerance");
       }},
      {"rerank.cold_tolerance",
       [](auto& c, auto v, auto& at) {
         c.cold_tolerance = parse_number<double>(v, at, "rerank.cold_tolerance");
       }},
      {"sweep.lambda_max",
       [](auto& c, auto v, auto& at) {
         c.lambda_max = parse_number<double>(v, at, "sweep.lambda_max");
       }},
      {"sweep.lambda_step",
       [](auto& c, auto v, auto& at) {
         c.lambda_step = parse_number<double>(v, at, "sweep.lambda_step");
       }},
      {"eval.budget",
       [](auto& c, auto v, auto& at) {
         c.budget = parse_number<double>(v, at, "eval.budget");
       }},
      {"eval.relevance_threshold",
       [](auto& c, auto v, auto& at) {
         c.relevance_threshold =
             parse_number<double>(v, at, "eval.relevance_threshold");
       }},
      {"cv.folds",
       [](auto& c, auto v, auto& at) {
         c.folds = parse_number<int>(v, at, "cv.folds");
       }},
      {"seed",
       [](auto& c, auto v, auto& at) {
         c.seed = parse_number<std::uint64_t>(v, at, "seed");
       }},
      {"output.dir",
       [](auto& c, auto v, auto&) { c.output_dir = std::string(v); }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config_text(std::string_view text, std::string_view origin) {
  ExperimentConfig config;
  Cursor at{origin, 0};
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line =
        text.substr(start, end == std::string_view::npos ? text.size() - start
                                                         : end - start);
    ++at.line;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) at.fail("expected key = value");
      const std::string_view key = trim(line.substr(0, eq));
      const std::string_view value = trim(line.substr(eq + 1));
      if (key.empty()) at.fail("empty key");
      const auto& table = setters();
      if (const auto it = table.find(key); it != table.end()) {
        it->second(config, value, at);
      } else {
        config.parse_notes.push_back("unknown key '" + std::string(key) + "'");
      }
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return config;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> out;
  auto bad = [&](std::string_view field, std::string_view why) {
    out.push_back(std::string(field) + ": " + std::string(why));
  };

  const bool transactions = c.data_kind == "transactions";
  if (!transactions && c.data_kind != "ratings") {
    bad("data.kind", "expects ratings or transactions");
  }
  if (c.data_path.empty()) bad("data.path", "required");
  if (c.k_core < 0) bad("data.k_core", "must be non-negative");
  if (c.user_column < 0 || c.item_column < 0 || c.rating_column < 0) {
    bad("data.user_column", "column indices must be non-negative");
  } else if (c.user_column == c.item_column || c.user_column == c.rating_column ||
             c.item_column == c.rating_column) {
    bad("data.user_column", "column indices must be distinct");
  }

  if (transactions) {
    if (c.tx_grouping.empty()) bad("transactions.grouping", "required");
    if (c.tx_provider_attribute.empty()) {
      bad("transactions.provider_attribute", "required");
    } else if (!c.tx_grouping.empty() &&
               std::find(c.tx_grouping.begin(), c.tx_grouping.end(),
                         c.tx_provider_attribute) == c.tx_grouping.end()) {
      bad("transactions.provider_attribute", "must appear in transactions.grouping");
    }
    if (c.tx_amount_attribute &&
        std::find(c.tx_grouping.begin(), c.tx_grouping.end(),
                  *c.tx_amount_attribute) == c.tx_grouping.end()) {
      bad("transactions.amount_attribute", "must appear in transactions.grouping");
    }
    if (c.tx_bins < 1) bad("transactions.bins", "must be at least 1");
    if (!c.provider_source.empty()) {
      bad("provider.source", "transaction data derives providers from its own attribute");
    }
  } else {
    if (c.provider_source == "file") {
      if (c.provider_path.empty()) bad("provider.path", "required for a file source");
    } else if (c.provider_source == "synthetic") {
      if (c.provider_count < 1) bad("provider.count", "must be at least 1");
      if (!(c.provider_p > 0.0 && c.provider_p < 1.0)) {
        bad("provider.p", "must lie in (0, 1)");
      }
    } else if (c.provider_source.empty()) {
      bad("provider.source", "required for rating data");
    } else {
      bad("provider.source", "expects file or synthetic");
    }
  }

  if (c.recommender == "item_knn" || c.recommender == "user_knn") {
    if (c.neighborhood < 1) bad("recommender.neighborhood", "must be at least 1");
  } else if (c.recommender == "wrmf") {
    if (c.factors < 1) bad("recommender.factors", "must be at least 1");
    if (!(c.regularization >= 0.0)) {
      bad("recommender.regularization", "must be non-negative");
    }
    if (!(c.alpha >= 0.0)) bad("recommender.alpha", "must be non-negative");
    if (c.iterations < 1) bad("recommender.iterations", "must be at least 1");
  } else if (c.recommender == "import") {
    if (c.rankings_path.empty()) bad("recommender.path", "required for import");
  } else if (c.recommender.empty()) {
    bad("recommender.kind", "required");
  } else {
    bad("recommender.kind", "expects item_knn, user_knn, wrmf, or import");
  }

  if (c.z < 1) bad("rerank.z", "must be at least 1");
  if (c.k < 1) bad("rerank.k", "must be at least 1");
  if (c.z >= 1 && c.k >= 1 && c.k > c.z) bad("rerank.k", "must not exceed rerank.z");
  if (c.cold_tolerance &&
      (!std::isfinite(*c.cold_tolerance) || *c.cold_tolerance < 0.0)) {
    bad("rerank.cold_tolerance", "must be non-negative and finite");
  }

  if (!std::isfinite(c.lambda_max) || c.lambda_max < 0.0) {
    bad("sweep.lambda_max", "must be non-negative and finite");
  }
  if (!std::isfinite(c.lambda_step) || c.lambda_step < 1e-6) {
    bad("sweep.lambda_step", "must be at least 1e-6");
  } else if (std::isfinite(c.lambda_max) && c.lambda_max / c.lambda_step >= 1e6) {
    bad("sweep.lambda_step", "grid would exceed a million points");
  }
  if (!(c.budget >= 0.0 && c.budget < 1.0)) bad("eval.budget", "must lie in [0, 1)");
  if (!std::isfinite(c.relevance_threshold)) {
    bad("eval.relevance_threshold", "must be finite");
  }
  if (c.folds < 2) bad("cv.folds", "must be at least 2");
  if (!c.seed) bad("seed", "required");
  if (c.output_dir.empty()) bad("output.dir", "required");

  out.insert(out.end(), c.parse_notes.begin(), c.parse_notes.end());
  return out;
}

}  // namespace farrank
