#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "farrank/dataset.hpp"

namespace farrank {

// Implicit-feedback factorization: observed ratings become unit
// preferences weighted by confidence 1 + alpha * r, everything else a
// zero preference at unit confidence.
struct FactorModel {
  Eigen::MatrixXd user_factors;  // users x factors
  Eigen::MatrixXd item_factors;  // items x factors
  double regularization = 0.0;
  double alpha = 0.0;
  // Weighted squared error plus the ridge penalty, recorded after every
  // completed alternating sweep. Exact updates keep it non-increasing.
  std::vector<double> objective_history;
};

FactorModel train_wrmf(const RatingsDataset& train, int factors,
                       double regularization, double alpha, int iterations,
                       std::uint64_t seed);

}  // namespace farrank
