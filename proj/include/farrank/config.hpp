#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "farrank/ranking.hpp"

namespace farrank {

// One experiment, as declared by a flat key = value file. Parsing fills
// the fields and records unknown keys; `validate_config` turns
// structural problems into a list of violations so a caller can report
// all of them at once.
struct ExperimentConfig {
  std::string data_kind = "ratings";  // ratings | transactions
  std::string data_path;
  char delimiter = '\t';
  int user_column = 0;
  int item_column = 1;
  int rating_column = 2;
  bool clamp_negative = false;
  int k_core = 0;  // 0 disables degree filtering

  std::string tx_user_column = "user";
  std::vector<std::string> tx_grouping;
  std::string tx_provider_attribute;
  std::optional<std::string> tx_amount_attribute;
  int tx_bins = 5;

  std::string provider_source;  // file | synthetic (transactions derive their own)
  std::string provider_path;
  int provider_count = 0;
  double provider_p = 0.3;
  std::string weights_path;

  std::string recommender;  // item_knn | user_knn | wrmf | import
  int neighborhood = 50;
  int factors = 10;
  double regularization = 0.01;
  double alpha = 40.0;
  int iterations = 15;
  std::string rankings_path;

  int z = 100;
  int k = 10;
  RerankMode mode = RerankMode::far;
  bool normalize_tolerance = false;
  std::optional<double> cold_tolerance;  // default log2(providers)

  double lambda_max = 2.0;
  double lambda_step = 0.05;
  double budget = 0.05;
  double relevance_threshold = 0.0;
  int folds = 5;

  std::optional<std::uint64_t> seed;
  std::string output_dir = "output";

  std::vector<std::string> parse_notes;  // unknown keys, kept for validation
};

// Throws on syntax errors (missing '=', unparsable values), naming the
// origin and line. Unknown keys are recorded, not fatal.
ExperimentConfig parse_config_text(std::string_view text, std::string_view origin);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Structural problems, one message per violated field; empty means the
// configuration is runnable.
std::vector<std::string> validate_config(const ExperimentConfig& config);

}  // namespace farrank
