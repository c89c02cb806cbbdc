#include "autostpp/autoint/naive.hpp"

#include <memory>
#include <string>

#include "autostpp/errors.hpp"
#include "autostpp/numkit/ops.hpp"

namespace autostpp::autoint {

using numkit::Tensor;

namespace {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

enum class Op { Input, Basis, Linear, Act, Mul, Add };

struct Node {
  Op op;
  std::size_t index = 0;  // axis for Basis, layer for Linear, order for Act
  bool bias = false;
  NodePtr a, b;
};

NodePtr make(Op op, std::size_t index, NodePtr a = nullptr, NodePtr b = nullptr,
             bool bias = false) {
  return std::make_shared<const Node>(Node{op, index, bias, std::move(a), std::move(b)});
}

// nullptr stands for the zero expression.
NodePtr diff(const NodePtr& n, std::size_t axis) {
  if (!n) return nullptr;
  switch (n->op) {
    case Op::Input:
      return make(Op::Basis, axis);
    case Op::Basis:
      return nullptr;
    case Op::Linear: {
      NodePtr d = diff(n->a, axis);
      return d ? make(Op::Linear, n->index, d) : nullptr;
    }
    case Op::Act: {
      NodePtr d = diff(n->a, axis);
      return d ? make(Op::Mul, 0, make(Op::Act, n->index + 1, n->a), d) : nullptr;
    }
    case Op::Mul: {
      NodePtr da = diff(n->a, axis), db = diff(n->b, axis);
      NodePtr left = da ? make(Op::Mul, 0, da, n->b) : nullptr;
      NodePtr right = db ? make(Op::Mul, 0, n->a, db) : nullptr;
      if (!left) return right;
      if (!right) return left;
      return make(Op::Add, 0, left, right);
    }
    case Op::Add: {
      NodePtr da = diff(n->a, axis), db = diff(n->b, axis);
      if (!da) return db;
      if (!db) return da;
      return make(Op::Add, 0, da, db);
    }
  }
  return nullptr;
}

NodePtr build(const ParamSet& params, const DerivSpec& dims) {
  const MlpSpec& spec = params.spec();
  dims.validate(spec.input_dim());
  NodePtr h = make(Op::Input, 0);
  for (std::size_t l = 0; l < spec.linear_layers(); ++l) {
    h = make(Op::Linear, l, h, nullptr, spec.bias);
    if (l + 1 < spec.linear_layers()) h = make(Op::Act, 0, h);
  }
  for (auto axis : dims.dims) h = diff(h, axis);
  return h;
}

struct Evaluator {
  const ParamSet& params;
  const std::vector<Tensor>& weights;
  const Tensor& x;

  Tensor eval(const Node& n) const {
    switch (n.op) {
      case Op::Input:
        return x;
      case Op::Basis: {
        Tensor e({x.rows(), x.cols()});
        for (std::size_t r = 0; r < x.rows(); ++r) e.at(r, n.index) = 1.0;
        return e;
      }
      case Op::Linear: {
        Tensor z = numkit::matmul_nt(eval(*n.a), weights[n.index]);
        if (n.bias) z = numkit::add_bias(z, params.layers()[n.index].b);
        return z;
      }
      case Op::Act: {
        Tensor z = eval(*n.a);
        const Activation& act = params.spec().activation;
        for (double& v : z.data()) v = act.derivative(v, static_cast<int>(n.index));
        return z;
      }
      case Op::Mul:
        return numkit::mul(eval(*n.a), eval(*n.b));
      case Op::Add:
        return numkit::add(eval(*n.a), eval(*n.b));
    }
    return {};
  }
};

std::size_t count(const Node* n) {
  if (!n) return 0;
  return 1 + count(n->a.get()) + count(n->b.get());
}

}  // namespace

Tensor naive_dnforward(const ParamSet& params, const Tensor& x, const DerivSpec& dims) {
  NodePtr root = build(params, dims);
  const MlpSpec& spec = params.spec();
  if (x.rank() != 2 || x.cols() != spec.input_dim()) {
    throw ShapeError("network input must be [batch, " + std::to_string(spec.input_dim()) +
                     "], got " + numkit::shape_str(x.shape()));
  }
  if (!root) return Tensor({x.rows(), 1});
  std::vector<Tensor> weights;
  for (std::size_t l = 0; l < spec.linear_layers(); ++l) weights.push_back(params.effective_weight(l));
  return Evaluator{params, weights, x}.eval(*root);
}

std::size_t naive_expression_size(const ParamSet& params, const DerivSpec& dims) {
  return count(build(params, dims).get());
}

}  // namespace autostpp::autoint
