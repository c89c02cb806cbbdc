#pragma once

// Two evaluation backends for network code written once as templates:
//
//   ValueBackend  plain tensors, no gradient bookkeeping
//   TapeBackend   recorded Vars; tensors bound with bind() become parameters
//
// Both expose the numkit op set through ADL on their Value type, plus
// param/constant and the activation-derivative sweep.

#include <unordered_map>
#include <vector>

#include "autostpp/autoint/activation.hpp"
#include "autostpp/numkit/ops.hpp"
#include "autostpp/numkit/tape.hpp"
#include "autostpp/numkit/var_ops.hpp"

namespace autostpp::autoint {

struct ValueBackend {
  using Value = numkit::Tensor;

  const numkit::Tensor& param(const numkit::Tensor& t) const { return t; }
  numkit::Tensor constant(numkit::Tensor t) const { return t; }
  std::vector<numkit::Tensor> activation(const Activation& act, const numkit::Tensor& z,
                                         int max_order) const {
    return act.derivatives(z, max_order);
  }
};

class TapeBackend {
 public:
  using Value = numkit::Var;

  explicit TapeBackend(numkit::Tape& tape) : tape_(&tape) {}

  numkit::Tape& tape() { return *tape_; }

  // Registers `t` as a parameter leaf; later param(t) calls return it.
  numkit::Var bind(const numkit::Tensor& t);
  // Bound leaf for `t`, or a (cached) constant leaf if `t` was never bound.
  numkit::Var param(const numkit::Tensor& t);
  numkit::Var constant(numkit::Tensor t) { return tape_->constant(std::move(t)); }

  // sigma^(k)(z) for k = 0..max_order as recorded nodes; node k back-propagates
  // through sigma^(k+1).
  std::vector<numkit::Var> activation(const Activation& act, const numkit::Var& z, int max_order);

 private:
  numkit::Tape* tape_;
  std::unordered_map<const numkit::Tensor*, numkit::Var> vars_;
};

}  // namespace autostpp::autoint
