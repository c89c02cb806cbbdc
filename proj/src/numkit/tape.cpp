#include "autostpp/numkit/tape.hpp"

#include "autostpp/errors.hpp"
#include "autostpp/numkit/ops.hpp"

namespace autostpp::numkit {

const Tensor& Var::value() const {
  if (!tape) throw std::logic_error("Var is not attached to a tape");
  return tape->value(id);
}

void GradSink::accumulate(std::size_t id, Tensor g) {
  Tensor& slot = grads_[id];
  if (slot.empty()) {
    slot = std::move(g);
  } else {
    slot = add(slot, g);
  }
}

const Tensor& Gradients::of(const Var& v) const {
  auto it = grads_.find(v.id);
  if (it == grads_.end()) throw std::out_of_range("no gradient recorded for this variable");
  return it->second;
}

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, false, false});
  return Var{this, nodes_.size() - 1};
}

Var Tape::param(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, true, true});
  return Var{this, nodes_.size() - 1};
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward) {
  bool needs = false;
  for (const Var& in : inputs) {
    if (in.tape != this) throw std::logic_error("operands recorded on different tapes");
    needs = needs || nodes_[in.id].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), needs ? std::move(backward) : BackwardFn{}, needs, false});
  return Var{this, nodes_.size() - 1};
}

Var Tape::record(Tensor value, const std::vector<Var>& inputs, BackwardFn backward) {
  bool needs = false;
  for (const Var& in : inputs) {
    if (in.tape != this) throw std::logic_error("operands recorded on different tapes");
    needs = needs || nodes_[in.id].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), needs ? std::move(backward) : BackwardFn{}, needs, false});
  return Var{this, nodes_.size() - 1};
}

Gradients Tape::backward(const Var& loss) const {
  if (loss.tape != this) throw std::invalid_argument("backward: loss is not recorded on this tape");
  if (nodes_[loss.id].value.size() != 1) {
    throw ShapeError("backward: loss must be a scalar, got shape " +
                     shape_str(nodes_[loss.id].value.shape()));
  }
  Gradients out;
  std::vector<Tensor> grads(loss.id + 1);
  grads[loss.id] = Tensor(nodes_[loss.id].value.shape(), 1.0);
  GradSink sink(grads);
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    const Node& node = nodes_[i];
    if (grads[i].empty() || !node.requires_grad) continue;
    if (node.is_param) {
      out.grads_.emplace(i, std::move(grads[i]));
    } else if (node.backward) {
      node.backward(grads[i], sink);
      grads[i] = Tensor();
    }
  }
  // Parameters the loss never touched get explicit zeros.
  for (std::size_t i = 0; i <= loss.id; ++i) {
    if (nodes_[i].is_param && !out.grads_.count(i)) {
      out.grads_.emplace(i, Tensor(nodes_[i].value.shape(), 0.0));
    }
  }
  return out;
}

}  // namespace autostpp::numkit
