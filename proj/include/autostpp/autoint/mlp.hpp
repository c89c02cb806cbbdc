#pragma once

#include <cstddef>
#include <vector>

#include "autostpp/autoint/activation.hpp"
#include "autostpp/numkit/tensor.hpp"
#include "autostpp/rng.hpp"
#include "json.hpp"

namespace autostpp::autoint {

enum class WeightMode {
  Free,
  // Stored weights rho; effective weights softplus(rho) > 0.
  NonNegative,
};

/// Architecture of a scalar-output integral network:
/// widths {d, h1, ..., hk, 1}; the activation follows every linear layer but
/// the last.
struct MlpSpec {
  std::vector<std::size_t> widths{1, 16, 16, 1};
  Activation activation{};
  bool bias = true;
  WeightMode weights = WeightMode::Free;

  std::size_t input_dim() const { return widths.front(); }
  std::size_t linear_layers() const { return widths.size() - 1; }
  void validate() const;

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

struct Layer {
  numkit::Tensor w;  // [out, in], raw (rho in NonNegative mode)
  numkit::Tensor b;  // [out]; empty when the spec has no bias

  friend bool operator==(const Layer&, const Layer&) = default;
};

/// Weights of one integral network. The derivative networks evaluated from it
/// read the same tensors, so any update is seen by both.
class ParamSet {
 public:
  ParamSet() = default;
  ParamSet(MlpSpec spec, std::vector<Layer> layers);

  // Glorot-uniform in Free mode; in NonNegative mode effective weights are
  // uniform on (0, 2 / fan_in]. Biases uniform on [-1, 1].
  static ParamSet init(const MlpSpec& spec, Rng& rng);
  // All raw values zero (effective weights softplus(0) in NonNegative mode).
  static ParamSet zeros(const MlpSpec& spec);

  const MlpSpec& spec() const { return spec_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  numkit::Tensor effective_weight(std::size_t layer) const;

  // Trainable tensors in a fixed order: w0, b0, w1, b1, ...
  std::vector<numkit::Tensor*> tensors();
  std::vector<const numkit::Tensor*> tensors() const;

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  MlpSpec spec_;
  std::vector<Layer> layers_;
};

void to_json(nlohmann::json& j, const MlpSpec& spec);
void from_json(const nlohmann::json& j, MlpSpec& spec);
// {"spec": ..., "layers": [{"w": [[...]], "b": [...]}, ...]}
void to_json(nlohmann::json& j, const ParamSet& p);
void from_json(const nlohmann::json& j, ParamSet& p);

}  // namespace autostpp::autoint
