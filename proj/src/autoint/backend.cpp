#include "autostpp/autoint/backend.hpp"

#include <memory>

namespace autostpp::autoint {

using numkit::GradSink;
using numkit::Tensor;
using numkit::Var;

Var TapeBackend::bind(const Tensor& t) {
  Var v = tape_->param(t);
  vars_[&t] = v;
  return v;
}

Var TapeBackend::param(const Tensor& t) {
  auto it = vars_.find(&t);
  if (it != vars_.end()) return it->second;
  Var v = tape_->constant(t);
  vars_.emplace(&t, v);
  return v;
}

std::vector<Var> TapeBackend::activation(const Activation& act, const Var& z, int max_order) {
  const bool needs_grad = tape_->requires_grad(z);
  auto orders = std::make_shared<std::vector<Tensor>>(
      act.derivatives(z.value(), needs_grad ? max_order + 1 : max_order));
  std::vector<Var> out;
  out.reserve(max_order + 1);
  for (int k = 0; k <= max_order; ++k) {
    out.push_back(tape_->record((*orders)[k], {z}, [z, orders, k](const Tensor& g, GradSink& s) {
      s.accumulate(z.id, numkit::mul(g, (*orders)[k + 1]));
    }));
  }
  return out;
}

}  // namespace autostpp::autoint
