#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "autostpp/numkit/tensor.hpp"

namespace autostpp::train {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Rescale gradients whose global L2 norm exceeds this; 0 disables.
  double clip_norm = 10.0;
};

struct AdamState {
  std::vector<numkit::Tensor> m, v;
  std::size_t step = 0;
};

struct StepInfo {
  double grad_norm = 0.0;
  bool clipped = false;
};

/// One bias-corrected Adam update of `params` in place. NumericError on a
/// non-finite gradient (parameters and state are left untouched).
StepInfo adam_step(std::span<numkit::Tensor* const> params, std::span<const numkit::Tensor> grads,
                   AdamState& state, const AdamConfig& cfg);

}  // namespace autostpp::train
