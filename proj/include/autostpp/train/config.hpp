#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "autostpp/autoint/mlp.hpp"
#include "autostpp/train/adam.hpp"
#include "json.hpp"

namespace autostpp::train {

struct TrainConfig {
  double lr = 0.001;
  // When non-empty, fit once per rate and keep the best validation NLL.
  std::vector<double> lr_grid;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 10.0;
  std::size_t epochs = 50;  // 0 evaluates the initial model only
  std::size_t batch = 128;  // examples (events) per step
  std::size_t n_prodnets = 2;
  std::vector<std::size_t> hidden{16, 16};
  std::string activation = "tanh";
  std::size_t window = 20;     // history length W
  std::size_t n_windows = 50;  // train/val/test windows cut from a long sequence
  bool freeze_influence = false;
  std::uint64_t seed = 0;

  // DomainError on out-of-range values.
  void validate() const;
  AdamConfig adam() const { return AdamConfig{lr, beta1, beta2, eps, clip_norm}; }
  autoint::MlpSpec factor_spec() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
// Missing keys keep their defaults; unknown keys are a DataError.
void from_json(const nlohmann::json& j, TrainConfig& c);

using EnvLookup = std::function<const char*(const char*)>;

/// Replace config keys from AUTOSTPP_<KEY> environment variables (key upper
/// case, e.g. AUTOSTPP_LR=0.004). Values are parsed as JSON, falling back to
/// a plain string.
void apply_env_overrides(nlohmann::json& config, const EnvLookup& getenv);
void apply_env_overrides(nlohmann::json& config);

/// Defaults, then `path` (if non-empty), then the environment.
TrainConfig load_config(const std::string& path);

}  // namespace autostpp::train
