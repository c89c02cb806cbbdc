#pragma once

#include <cstdint>
#include <vector>

namespace autostpp::train {

/// Regression of a positive derivative network onto
///   f(x, y, z) = sin(x) cos(y) sin(z) + 1   over [0, 2 pi]^3
/// from uniformly drawn training points.
struct FitcheckConfig {
  std::size_t n_points = 4096;
  std::size_t steps = 3000;  // Adam steps
  std::size_t batch = 512;   // points per step, drawn without replacement per pass
  double lr = 0.005;
  std::uint64_t seed = 0;
};

struct FitcheckResult {
  double mse = 0.0;           // final MSE over all training points
  std::vector<double> curve;  // minibatch MSE every 100 steps
};

double fitcheck_target(double x, double y, double z);

/// Sum of n_terms nonnegative ProdNets.
FitcheckResult fitcheck_prodsum(std::size_t n_terms, const FitcheckConfig& cfg);
/// One nonnegative network differentiated once in each of its three inputs.
FitcheckResult fitcheck_constrained_triple(const FitcheckConfig& cfg);

}  // namespace autostpp::train
