#include "autostpp/train/fitcheck.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "autostpp/autoint/dnforward.hpp"
#include "autostpp/errors.hpp"
#include "autostpp/prodnet/prodsum.hpp"
#include "autostpp/rng.hpp"
#include "autostpp/train/adam.hpp"

namespace autostpp::train {

using numkit::Tensor;
using numkit::Var;

namespace {

struct Data {
  Tensor x, y, z, xyz, target;
};

Data empty_data(std::size_t n) {
  return Data{Tensor({n, 1}), Tensor({n, 1}), Tensor({n, 1}), Tensor({n, 3}), Tensor({n, 1})};
}

void set_point(Data& d, std::size_t i, double x, double y, double z) {
    d.x[i] = x;
    d.y[i] = y;
    d.z[i] = z;
    d.xyz[3 * i] = x;
    d.xyz[3 * i + 1] = y;
    d.xyz[3 * i + 2] = z;
    d.target[i] = fitcheck_target(x, y, z);
}

Data make_data(const FitcheckConfig& cfg) {
  if (cfg.n_points == 0 || cfg.batch == 0) throw DomainError("fitcheck needs at least one point per batch");
  Data d = empty_data(cfg.n_points);
  Rng rng(cfg.seed, "fitcheck-data");
  const double hi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < cfg.n_points; ++i) {
    const double x = rng.uniform(0.0, hi), y = rng.uniform(0.0, hi), z = rng.uniform(0.0, hi);
    set_point(d, i, x, y, z);
  }
  return d;
}

double mse_of(const Tensor& pred, const Tensor& target) {
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - target[i]) * (pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

// Minibatch Adam on the MSE of `predict(be, batch)` against the target.
template <class Predict>
FitcheckResult regress(const std::vector<Tensor*>& params, const Data& d, const FitcheckConfig& cfg,
                       Predict predict) {
  AdamConfig adam;
  adam.lr = cfg.lr;
  AdamState state;
  FitcheckResult res;
  const std::size_t n = d.target.size(), bs = std::min(cfg.batch, n);
  const double inv_n = 1.0 / static_cast<double>(bs);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = n;
  Rng rng(cfg.seed, "fitcheck-batch");
  Data b = empty_data(bs);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    for (std::size_t i = 0; i < bs; ++i) {
      if (cursor == n) {
        for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[rng.index(k)]);
        cursor = 0;
      }
      const std::size_t r = order[cursor++];
      set_point(b, i, d.x[r], d.y[r], d.z[r]);
    }
    numkit::Tape tape;
    autoint::TapeBackend be(tape);
    std::vector<Var> leaves;
    for (auto* p : params) leaves.push_back(be.bind(*p));
    const Var pred = predict(be, b);
    const Var loss = scale(sum(square(sub(pred, be.constant(b.target)))), inv_n);
    if (step % 100 == 0) res.curve.push_back(loss.value().item());
    const auto grads = tape.backward(loss);
    std::vector<Tensor> g;
    for (std::size_t k = 0; k < params.size(); ++k) {
      g.push_back(grads.has(leaves[k]) ? grads.of(leaves[k]) : Tensor(params[k]->shape()));
    }
    adam_step(params, g, state, adam);
  }
  return res;
}

}  // namespace

double fitcheck_target(double x, double y, double z) { return std::sin(x) * std::cos(y) * std::sin(z) + 1.0; }

FitcheckResult fitcheck_prodsum(std::size_t n_terms, const FitcheckConfig& cfg) {
  if (n_terms == 0) throw DomainError("fitcheck needs at least one ProdNet");
  const Data d = make_data(cfg);
  Rng rng(cfg.seed, "fitcheck-init");
  auto ps = prodnet::ProdSum::init(n_terms, prodnet::ProdSum::default_factor_spec(), rng);
  auto res = regress(ps.tensors(), d, cfg, [&](autoint::TapeBackend& be, const Data& b) {
    const auto bound = prodnet::bind(be, ps);
    return prodnet::influence(be, bound, std::array<Var, 3>{be.constant(b.x), be.constant(b.y), be.constant(b.z)});
  });
  autoint::ValueBackend vb;
  res.mse = mse_of(prodnet::influence(vb, prodnet::bind(vb, ps), std::array<Tensor, 3>{d.x, d.y, d.z}), d.target);
  return res;
}

FitcheckResult fitcheck_constrained_triple(const FitcheckConfig& cfg) {
  const Data d = make_data(cfg);
  Rng rng(cfg.seed, "fitcheck-init");
  auto net = prodnet::ConstrainedTriple::init(prodnet::ConstrainedTriple::default_spec(), rng);
  const autoint::DerivSpec dims{{0, 1, 2}};
  auto res = regress(net.params().tensors(), d, cfg, [&](autoint::TapeBackend& be, const Data& b) {
    return autoint::dnforward(be, autoint::bind(be, net.params()), be.constant(b.xyz), dims, nullptr);
  });
  res.mse = mse_of(net.influence(d.xyz), d.target);
  return res;
}

}  // namespace autostpp::train
