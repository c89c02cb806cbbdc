#include "autostpp/autoint/dnforward.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <string>

#include "autostpp/autoint/partitions.hpp"
#include "autostpp/errors.hpp"

namespace autostpp::autoint {

using numkit::Tensor;
using numkit::Var;

void DerivSpec::validate(std::size_t input_dim) const {
  if (dims.empty()) throw DomainError("derivative spec must name at least one axis");
  if (dims.size() > static_cast<std::size_t>(Activation::kMaxOrder)) {
    throw DomainError("derivative of order " + std::to_string(dims.size()) +
                      " requested; activations provide orders up to " +
                      std::to_string(Activation::kMaxOrder));
  }
  for (auto d : dims) {
    if (d >= input_dim) {
      throw DomainError("derivative axis " + std::to_string(d) + " out of range for input width " +
                        std::to_string(input_dim));
    }
  }
}

namespace {

const Tensor& value_of(const Tensor& t) { return t; }
const Tensor& value_of(const Var& v) { return v.value(); }

// One Faa di Bruno term: sigma^(order)(z) times the product of the block
// sub-derivatives.
struct Term {
  int order;
  std::vector<int> blocks;
};

struct Slot {
  std::vector<std::size_t> axes;  // sorted multiset
  std::size_t axis = 0;           // valid when axes.size() == 1
  std::vector<Term> terms;
};

struct DerivPlan {
  std::vector<Slot> slots;  // ascending subset size
  int full = 0;
  int order = 0;
};

DerivPlan build_plan(const std::vector<std::size_t>& dims) {
  const unsigned n = static_cast<unsigned>(dims.size());
  std::vector<unsigned> masks;
  for (unsigned m = 1; m < (1u << n); ++m) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(),
                   [](unsigned a, unsigned b) { return std::popcount(a) < std::popcount(b); });

  auto axes_of = [&](unsigned mask) {
    std::vector<std::size_t> axes;
    for (unsigned i = 0; i < n; ++i) {
      if (mask & (1u << i)) axes.push_back(dims[i]);
    }
    std::sort(axes.begin(), axes.end());
    return axes;
  };

  DerivPlan plan;
  plan.order = static_cast<int>(n);
  std::map<std::vector<std::size_t>, int> slot_of;
  std::vector<unsigned> representative;
  for (unsigned m : masks) {
    auto axes = axes_of(m);
    if (slot_of.count(axes)) continue;
    slot_of.emplace(axes, static_cast<int>(plan.slots.size()));
    Slot s;
    s.axes = axes;
    if (axes.size() == 1) s.axis = axes[0];
    plan.slots.push_back(std::move(s));
    representative.push_back(m);
  }

  for (std::size_t s = 0; s < plan.slots.size(); ++s) {
    std::vector<unsigned> positions;
    for (unsigned i = 0; i < n; ++i) {
      if (representative[s] & (1u << i)) positions.push_back(i);
    }
    for (std::size_t k = 1; k <= positions.size(); ++k) {
      for (const auto& part : index_partitions(positions.size(), k)) {
        Term t{static_cast<int>(k), {}};
        for (const auto& block : part) {
          unsigned mask = 0;
          for (auto idx : block) mask |= 1u << positions[idx];
          t.blocks.push_back(slot_of.at(axes_of(mask)));
        }
        plan.slots[s].terms.push_back(std::move(t));
      }
    }
  }
  plan.full = slot_of.at(axes_of((1u << n) - 1));
  return plan;
}

const DerivPlan& plan_for(const std::vector<std::size_t>& dims) {
  thread_local std::map<std::vector<std::size_t>, DerivPlan> cache;
  auto it = cache.find(dims);
  if (it == cache.end()) it = cache.emplace(dims, build_plan(dims)).first;
  return it->second;
}

void check_input(const MlpSpec& spec, const Tensor& x) {
  if (x.rank() != 2 || x.cols() != spec.input_dim()) {
    throw ShapeError("network input must be [batch, " + std::to_string(spec.input_dim()) +
                     "], got " + numkit::shape_str(x.shape()));
  }
}

}  // namespace

template <class Be>
BoundMlp<Be> bind(Be& be, const ParamSet& params) {
  using V = typename Be::Value;
  BoundMlp<Be> net;
  net.spec = &params.spec();
  for (const auto& layer : params.layers()) {
    V raw = be.param(layer.w);
    net.w.push_back(params.spec().weights == WeightMode::NonNegative ? softplus(raw) : raw);
    if (layer.b.empty()) {
      net.b.emplace_back();
    } else {
      net.b.emplace_back(V(be.param(layer.b)));
    }
  }
  return net;
}

template <class Be>
typename Be::Value integral_forward(Be& be, const BoundMlp<Be>& net, const typename Be::Value& x) {
  using V = typename Be::Value;
  const MlpSpec& spec = *net.spec;
  check_input(spec, value_of(x));
  V h = x;
  const std::size_t layers = spec.linear_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    V z = matmul_nt(h, net.w[l]);
    if (net.b[l]) z = add_bias(z, *net.b[l]);
    if (l + 1 == layers) return z;
    h = be.activation(spec.activation, z, 0)[0];
  }
  return h;  // unreachable: validate() guarantees at least one layer
}

template <class Be>
typename Be::Value dnforward(Be& be, const BoundMlp<Be>& net, const typename Be::Value& x,
                             const DerivSpec& dims, DerivStats* stats) {
  using V = typename Be::Value;
  const MlpSpec& spec = *net.spec;
  dims.validate(spec.input_dim());
  check_input(spec, value_of(x));
  const DerivPlan& plan = plan_for(dims.dims);
  const std::size_t batch = value_of(x).rows();
  const std::size_t layers = spec.linear_layers();
  const std::size_t n_slots = plan.slots.size();
  if (stats) {
    stats->activation_orders.clear();
    stats->cached_subsets = n_slots;
  }

  // d[s]: derivative of the current layer input by slot s; empty means zero.
  std::vector<std::optional<V>> d(n_slots), dz(n_slots);
  V h = x;
  for (std::size_t l = 0; l < layers; ++l) {
    const V& w = net.w[l];
    const bool last = l + 1 == layers;
    for (std::size_t s = 0; s < n_slots; ++s) {
      dz[s].reset();
      if (last && static_cast<int>(s) != plan.full) continue;
      if (l == 0) {
        // d x / d x_a is the unit vector e_a, so W e_a is column a of W.
        if (plan.slots[s].axes.size() == 1) {
          dz[s] = tile_rows(column_as_row(w, plan.slots[s].axis), batch);
        }
      } else if (d[s]) {
        dz[s] = matmul_nt(*d[s], w);
      }
    }
    if (last) {
      if (dz[plan.full]) return *dz[plan.full];
      return be.constant(Tensor({batch, 1}));
    }

    V z = matmul_nt(h, w);
    if (net.b[l]) z = add_bias(z, *net.b[l]);
    std::vector<V> sigma = be.activation(spec.activation, z, plan.order);
    if (stats) stats->activation_orders.push_back(plan.order + 1);

    const bool last_hidden = l + 2 == layers;
    for (std::size_t s = 0; s < n_slots; ++s) {
      d[s].reset();
      if (last_hidden && static_cast<int>(s) != plan.full) continue;
      for (const Term& term : plan.slots[s].terms) {
        bool zero = false;
        for (int b : term.blocks) zero = zero || !dz[b];
        if (zero) continue;
        V prod = mul(sigma[term.order], *dz[term.blocks[0]]);
        for (std::size_t i = 1; i < term.blocks.size(); ++i) prod = mul(prod, *dz[term.blocks[i]]);
        d[s] = d[s] ? add(*d[s], prod) : prod;
      }
    }
    h = sigma[0];
  }
  return h;  // unreachable
}

Tensor integral_forward(const ParamSet& params, const Tensor& x) {
  ValueBackend be;
  return integral_forward(be, bind(be, params), x);
}

Tensor dnforward(const ParamSet& params, const Tensor& x, const DerivSpec& dims, DerivStats* stats) {
  ValueBackend be;
  return dnforward(be, bind(be, params), x, dims, stats);
}

template BoundMlp<ValueBackend> bind(ValueBackend&, const ParamSet&);
template BoundMlp<TapeBackend> bind(TapeBackend&, const ParamSet&);
template Tensor integral_forward(ValueBackend&, const BoundMlp<ValueBackend>&, const Tensor&);
template Var integral_forward(TapeBackend&, const BoundMlp<TapeBackend>&, const Var&);
template Tensor dnforward(ValueBackend&, const BoundMlp<ValueBackend>&, const Tensor&,
                          const DerivSpec&, DerivStats*);
template Var dnforward(TapeBackend&, const BoundMlp<TapeBackend>&, const Var&, const DerivSpec&,
                       DerivStats*);

}  // namespace autostpp::autoint
