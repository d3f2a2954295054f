#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "farrank/config.hpp"
#include "farrank/error.hpp"
#include "farrank/experiment.hpp"
#include "farrank/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Provider-fair re-ranking experiments"};
  app.require_subcommand(1);

  std::string run_config;
  std::string check_config;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;

  CLI::App* run = app.add_subcommand("run", "Execute one experiment end to end");
  run->add_option("config", run_config, "experiment configuration file")->required();
  run->add_option("--workers", workers, "concurrent folds and grid points")
      ->check(CLI::PositiveNumber);

  CLI::App* check =
      app.add_subcommand("validate", "Report configuration violations");
  check->add_option("config", check_config, "experiment configuration file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (run->parsed()) {
      const farrank::ExperimentConfig config =
          farrank::parse_config_file(run_config);
      const farrank::ExperimentResult result =
          farrank::run_experiment(config, workers);
      std::cerr << "lambda_star " << farrank::format_double(result.pick.lambda)
                << " apcr " << farrank::format_double(result.pick.apcr)
                << " relative_gain_pct "
                << farrank::format_double(result.pick.relative_gain * 100.0)
                << "\n";
      std::cerr << "wrote " << result.report_path.string() << "\n";
      std::cerr << "wrote " << result.summary_path.string() << "\n";
      std::cerr << "wrote " << result.histogram_path.string() << "\n";
      std::cerr << "wrote " << result.manifest_path.string() << "\n";
      return 0;
    }
    const farrank::ExperimentConfig config =
        farrank::parse_config_file(check_config);
    const std::vector<std::string> violations = farrank::validate_config(config);
    if (violations.empty()) {
      std::cerr << "ok\n";
      return 0;
    }
    for (const std::string& v : violations) {
      std::cerr << "violation: " << v << "\n";
    }
    return 1;
  } catch (const farrank::Error& e) {
    std::cerr << "error " << e.code_name() << ": " << e.what() << "\n";
    return e.code() == farrank::ErrorCode::config ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error INTERNAL: " << e.what() << "\n";
    return 2;
  }
}
