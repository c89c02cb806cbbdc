#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <vector>

#include "autostpp/numkit/tensor.hpp"

namespace autostpp::numkit {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
};

/// Receives gradient contributions for the inputs of a node during backward().
class GradSink {
 public:
  explicit GradSink(std::vector<Tensor>& grads) : grads_(grads) {}
  void accumulate(std::size_t id, Tensor g);

 private:
  std::vector<Tensor>& grads_;
};

using BackwardFn = std::function<void(const Tensor& grad_out, GradSink& sink)>;

/// Gradients of a scalar loss with respect to the parameter leaves of a tape.
class Gradients {
 public:
  bool has(const Var& v) const { return grads_.count(v.id) != 0; }
  const Tensor& of(const Var& v) const;
  std::size_t size() const { return grads_.size(); }

 private:
  friend class Tape;
  std::map<std::size_t, Tensor> grads_;
};

/// Append-only record of primitive evaluations for reverse-mode differentiation.
///
/// Values are computed eagerly when recorded. A node keeps a backward rule only
/// if some input requires gradients, so a tape with no parameters doubles as a
/// plain evaluator. Single-threaded.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var param(Tensor value);

  // Records a derived node. `inputs` are the nodes the backward rule feeds.
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward);
  Var record(Tensor value, const std::vector<Var>& inputs, BackwardFn backward);

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(const Var& v) const { return nodes_[v.id].requires_grad; }
  bool is_param(const Var& v) const { return nodes_[v.id].is_param; }
  std::size_t size() const { return nodes_.size(); }

  /// Reverse sweep from `loss` (one element, recorded on this tape). Every node
  /// at or below loss.id is visited once; only parameter leaves get entries.
  Gradients backward(const Var& loss) const;

 private:
  struct Node {
    Tensor value;
    BackwardFn backward;
    bool requires_grad = false;
    bool is_param = false;
  };
  std::vector<Node> nodes_;
};

}  // namespace autostpp::numkit
