#include "autostpp/autoint/mlp.hpp"

#include <cmath>
#include <string>

#include "autostpp/errors.hpp"
#include "autostpp/numkit/ops.hpp"

namespace autostpp::autoint {

using numkit::Tensor;

void MlpSpec::validate() const {
  if (widths.size() < 2) throw DataError("MlpSpec needs at least an input and an output width");
  for (auto w : widths) {
    if (w == 0) throw DataError("MlpSpec widths must be positive");
  }
  if (widths.back() != 1) throw DataError("integral networks have a scalar output (last width 1)");
}

ParamSet::ParamSet(MlpSpec spec, std::vector<Layer> layers)
    : spec_(std::move(spec)), layers_(std::move(layers)) {
  spec_.validate();
  if (layers_.size() != spec_.linear_layers()) {
    throw DataError("ParamSet has " + std::to_string(layers_.size()) + " layers, spec needs " +
                    std::to_string(spec_.linear_layers()));
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const numkit::Shape want{spec_.widths[l + 1], spec_.widths[l]};
    if (layers_[l].w.shape() != want) {
      throw DataError("layer " + std::to_string(l) + " weight shape " +
                      numkit::shape_str(layers_[l].w.shape()) + ", expected " +
                      numkit::shape_str(want));
    }
    const std::size_t nb = spec_.bias ? spec_.widths[l + 1] : 0;
    if (layers_[l].b.size() != nb) {
      throw DataError("layer " + std::to_string(l) + " bias has " +
                      std::to_string(layers_[l].b.size()) + " entries, expected " +
                      std::to_string(nb));
    }
  }
}

ParamSet ParamSet::init(const MlpSpec& spec, Rng& rng) {
  spec.validate();
  std::vector<Layer> layers;
  for (std::size_t l = 0; l < spec.linear_layers(); ++l) {
    const std::size_t in = spec.widths[l], out = spec.widths[l + 1];
    const double a = std::sqrt(6.0 / static_cast<double>(in + out));
    Tensor w({out, in});
    for (auto& v : w.data()) {
      if (spec.weights == WeightMode::Free) {
        v = rng.uniform(-a, a);
      } else {
        // Rows sum to 1 on average, so derivative products stay O(1) with depth.
        const double eff = std::max(2.0 * rng.uniform() / static_cast<double>(in), 1e-4);
        v = std::log(std::expm1(eff));
      }
    }
    Tensor b = spec.bias ? Tensor({out}) : Tensor();
    for (auto& v : b.data()) v = rng.uniform(-1.0, 1.0);
    layers.push_back({std::move(w), std::move(b)});
  }
  return ParamSet(spec, std::move(layers));
}

ParamSet ParamSet::zeros(const MlpSpec& spec) {
  spec.validate();
  std::vector<Layer> layers;
  for (std::size_t l = 0; l < spec.linear_layers(); ++l) {
    const std::size_t in = spec.widths[l], out = spec.widths[l + 1];
    layers.push_back({Tensor({out, in}), spec.bias ? Tensor({out}) : Tensor()});
  }
  return ParamSet(spec, std::move(layers));
}

Tensor ParamSet::effective_weight(std::size_t layer) const {
  const Tensor& w = layers_.at(layer).w;
  return spec_.weights == WeightMode::NonNegative ? numkit::softplus(w) : w;
}

std::vector<Tensor*> ParamSet::tensors() {
  std::vector<Tensor*> out;
  for (auto& l : layers_) {
    out.push_back(&l.w);
    if (!l.b.empty()) out.push_back(&l.b);
  }
  return out;
}

std::vector<const Tensor*> ParamSet::tensors() const {
  std::vector<const Tensor*> out;
  for (const auto& l : layers_) {
    out.push_back(&l.w);
    if (!l.b.empty()) out.push_back(&l.b);
  }
  return out;
}

void to_json(nlohmann::json& j, const MlpSpec& spec) {
  j = nlohmann::json{{"widths", spec.widths},
                     {"activation", std::string(spec.activation.name())},
                     {"bias", spec.bias},
                     {"weights", spec.weights == WeightMode::Free ? "free" : "nonnegative"}};
}

void from_json(const nlohmann::json& j, MlpSpec& spec) {
  spec.widths = j.at("widths").get<std::vector<std::size_t>>();
  spec.activation = Activation::from_name(j.value("activation", std::string("tanh")));
  spec.bias = j.value("bias", true);
  const std::string mode = j.value("weights", std::string("free"));
  if (mode == "free") {
    spec.weights = WeightMode::Free;
  } else if (mode == "nonnegative") {
    spec.weights = WeightMode::NonNegative;
  } else {
    throw DataError("unknown weight mode '" + mode + "'");
  }
  spec.validate();
}

void to_json(nlohmann::json& j, const ParamSet& p) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : p.layers()) {
    nlohmann::json w = nlohmann::json::array();
    for (std::size_t r = 0; r < l.w.rows(); ++r) {
      w.push_back(std::vector<double>(l.w.ptr() + r * l.w.cols(), l.w.ptr() + (r + 1) * l.w.cols()));
    }
    layers.push_back({{"w", std::move(w)},
                      {"b", std::vector<double>(l.b.data().begin(), l.b.data().end())}});
  }
  j = nlohmann::json{{"spec", p.spec()}, {"layers", std::move(layers)}};
}

void from_json(const nlohmann::json& j, ParamSet& p) {
  MlpSpec spec = j.at("spec").get<MlpSpec>();
  std::vector<Layer> layers;
  for (const auto& jl : j.at("layers")) {
    std::vector<double> data;
    std::size_t rows = 0, cols = 0;
    for (const auto& row : jl.at("w")) {
      auto r = row.get<std::vector<double>>();
      if (rows == 0) cols = r.size();
      if (r.size() != cols) throw DataError("ragged weight matrix in ParamSet");
      data.insert(data.end(), r.begin(), r.end());
      ++rows;
    }
    auto b = jl.value("b", std::vector<double>{});
    const std::size_t nb = b.size();
    Tensor bt = b.empty() ? Tensor() : Tensor({nb}, std::move(b));
    layers.push_back({Tensor({rows, cols}, std::move(data)), std::move(bt)});
  }
  p = ParamSet(std::move(spec), std::move(layers));
}

}  // namespace autostpp::autoint
