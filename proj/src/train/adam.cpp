#include "autostpp/train/adam.hpp"

#include <cmath>
#include <string>

#include "autostpp/errors.hpp"

namespace autostpp::train {

using numkit::Tensor;

StepInfo adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, AdamState& state,
                   const AdamConfig& cfg) {
  if (params.size() != grads.size()) {
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " parameters but " +
                     std::to_string(grads.size()) + " gradients");
  }
  double sq = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (grads[k].shape() != params[k]->shape()) {
      throw ShapeError("adam_step: gradient " + std::to_string(k) + " has shape " +
                       numkit::shape_str(grads[k].shape()) + ", parameter has " +
                       numkit::shape_str(params[k]->shape()));
    }
    for (double g : grads[k].data()) sq += g * g;
  }
  StepInfo info;
  info.grad_norm = std::sqrt(sq);
  if (!std::isfinite(info.grad_norm)) throw NumericError("non-finite gradient in Adam step");

  if (state.m.size() != params.size()) {
    state.m.clear();
    state.v.clear();
    for (auto* p : params) {
      state.m.emplace_back(p->shape());
      state.v.emplace_back(p->shape());
    }
    state.step = 0;
  }
  double scale = 1.0;
  if (cfg.clip_norm > 0.0 && info.grad_norm > cfg.clip_norm) {
    scale = cfg.clip_norm / info.grad_norm;
    info.clipped = true;
  }

  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params[k]->data();
    auto g = grads[k].data();
    auto m = state.m[k].data();
    auto v = state.v[k].data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = g[i] * scale;
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
      p[i] -= cfg.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.eps);
    }
  }
  return info;
}

}  // namespace autostpp::train
