#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "autostpp/autoint/backend.hpp"
#include "autostpp/autoint/mlp.hpp"

namespace autostpp::autoint {

/// Ordered multiset of input axes to differentiate by, e.g. {0, 1, 2} for the
/// triple mixed partial or {0, 0} for a second derivative.
struct DerivSpec {
  std::vector<std::size_t> dims;

  // Nonempty, every axis < input_dim, order <= Activation::kMaxOrder.
  void validate(std::size_t input_dim) const;
};

/// A ParamSet resolved for one backend: effective weights are materialised
/// once and shared by every pass evaluated from it.
template <class Be>
struct BoundMlp {
  const MlpSpec* spec = nullptr;
  std::vector<typename Be::Value> w;
  std::vector<std::optional<typename Be::Value>> b;
};

template <class Be>
BoundMlp<Be> bind(Be& be, const ParamSet& params);

/// Per-call bookkeeping, used to check that memoisation bounds the work.
struct DerivStats {
  // Number of activation-derivative orders evaluated at each hidden layer.
  std::vector<int> activation_orders;
  // Distinct sub-derivatives (multisets of axes) carried through the layers.
  std::size_t cached_subsets = 0;
};

/// F(x) for x of shape [batch, input_dim]; returns [batch, 1].
template <class Be>
typename Be::Value integral_forward(Be& be, const BoundMlp<Be>& net, const typename Be::Value& x);

/// Exact mixed partial d^|dims| F / dx_dims, shape [batch, 1].
///
/// Layer-by-layer dynamic programme: linear layers map every cached
/// sub-derivative through W^T; an activation layer combines them with the
/// Faa di Bruno sum over set partitions of each subset, weighted by
/// sigma^(#blocks)(z). Sub-derivatives are keyed by the multiset of axes they
/// differentiate, so {0,0,0} carries three entries where {0,1,2} carries seven.
template <class Be>
typename Be::Value dnforward(Be& be, const BoundMlp<Be>& net, const typename Be::Value& x,
                             const DerivSpec& dims, DerivStats* stats = nullptr);

// Plain-tensor conveniences.
numkit::Tensor integral_forward(const ParamSet& params, const numkit::Tensor& x);
numkit::Tensor dnforward(const ParamSet& params, const numkit::Tensor& x, const DerivSpec& dims,
                         DerivStats* stats = nullptr);

extern template BoundMlp<ValueBackend> bind(ValueBackend&, const ParamSet&);
extern template BoundMlp<TapeBackend> bind(TapeBackend&, const ParamSet&);
extern template numkit::Tensor integral_forward(ValueBackend&, const BoundMlp<ValueBackend>&,
                                                const numkit::Tensor&);
extern template numkit::Var integral_forward(TapeBackend&, const BoundMlp<TapeBackend>&,
                                             const numkit::Var&);
extern template numkit::Tensor dnforward(ValueBackend&, const BoundMlp<ValueBackend>&,
                                         const numkit::Tensor&, const DerivSpec&, DerivStats*);
extern template numkit::Var dnforward(TapeBackend&, const BoundMlp<TapeBackend>&,
                                      const numkit::Var&, const DerivSpec&, DerivStats*);

}  // namespace autostpp::autoint
