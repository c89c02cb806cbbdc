#include "autostpp/prodnet/prodsum.hpp"

#include <string>

#include "autostpp/errors.hpp"
#include "autostpp/numkit/ops.hpp"

namespace autostpp::prodnet {

using autoint::DerivSpec;
using autoint::MlpSpec;
using autoint::ParamSet;
using autoint::TapeBackend;
using autoint::ValueBackend;
using numkit::Tensor;
using numkit::Var;

namespace {

constexpr const char* kAxisNames[3] = {"x", "y", "t"};

Tensor one(double v) { return Tensor({1, 1}, {v}); }

}  // namespace

void Cuboid::validate() const {
  for (int k = 0; k < 3; ++k) {
    if (!(lo[k] < hi[k])) {
      throw DomainError(std::string("degenerate cuboid on axis ") + kAxisNames[k] + ": [" +
                        std::to_string(lo[k]) + ", " + std::to_string(hi[k]) + "]");
    }
  }
}

double Cuboid::volume() const { return (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]); }

ProdSum::ProdSum(std::vector<ProdTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw DataError("ProdSum needs at least one term");
  for (const auto& term : terms_) {
    for (const auto& f : term.factor) {
      if (f.spec().input_dim() != 1) throw DataError("ProdSum factors must be univariate");
    }
  }
}

MlpSpec ProdSum::default_factor_spec() {
  MlpSpec spec;
  spec.widths = {1, 16, 16, 1};
  spec.weights = autoint::WeightMode::NonNegative;
  return spec;
}

ProdSum ProdSum::init(std::size_t n_terms, const MlpSpec& factor_spec, Rng& rng) {
  std::vector<ProdTerm> terms(n_terms);
  for (auto& term : terms) {
    for (auto& f : term.factor) f = ParamSet::init(factor_spec, rng);
  }
  return ProdSum(std::move(terms));
}

bool ProdSum::constrained() const {
  for (const auto& term : terms_) {
    for (const auto& f : term.factor) {
      if (f.spec().weights != autoint::WeightMode::NonNegative || !f.spec().activation.monotone()) {
        return false;
      }
    }
  }
  return true;
}

double ProdSum::influence(double dx, double dy, double dt) const {
  ValueBackend be;
  auto bound = prodnet::bind(be, *this);
  return prodnet::influence(be, bound, {one(dx), one(dy), one(dt)}).item();
}

double ProdSum::antideriv(double x, double y, double t) const {
  const double at[3] = {x, y, t};
  double total = 0.0;
  for (const auto& term : terms_) {
    double prod = 1.0;
    for (int k = 0; k < 3; ++k) prod *= autoint::integral_forward(term.factor[k], one(at[k])).item();
    total += prod;
  }
  return total;
}

double ProdSum::cuboid_integral(const Cuboid& c) const {
  c.validate();
  ValueBackend be;
  auto bound = prodnet::bind(be, *this);
  return box_integral(be, bound, {one(c.lo[0]), one(c.lo[1]), one(c.lo[2])},
                      {one(c.hi[0]), one(c.hi[1]), one(c.hi[2])})
      .item();
}

std::vector<Tensor*> ProdSum::tensors() {
  std::vector<Tensor*> out;
  for (auto& term : terms_) {
    for (auto& f : term.factor) {
      for (auto* t : f.tensors()) out.push_back(t);
    }
  }
  return out;
}

std::vector<const Tensor*> ProdSum::tensors() const {
  std::vector<const Tensor*> out;
  for (const auto& term : terms_) {
    for (const auto& f : term.factor) {
      for (auto* t : f.tensors()) out.push_back(t);
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const ProdSum& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& term : p.terms()) {
    terms.push_back({{"x", term.factor[0]}, {"y", term.factor[1]}, {"t", term.factor[2]}});
  }
  j = nlohmann::json{{"N", p.size()}, {"terms", std::move(terms)}};
}

void from_json(const nlohmann::json& j, ProdSum& p) {
  std::vector<ProdTerm> terms;
  for (const auto& jt : j.at("terms")) {
    ProdTerm term;
    for (int k = 0; k < 3; ++k) term.factor[k] = jt.at(kAxisNames[k]).get<ParamSet>();
    terms.push_back(std::move(term));
  }
  if (j.contains("N") && j.at("N").get<std::size_t>() != terms.size()) {
    throw DataError("prodsum N does not match the number of terms");
  }
  p = ProdSum(std::move(terms));
}

template <class Be>
BoundProdSum<Be> bind(Be& be, const ProdSum& ps) {
  BoundProdSum<Be> out;
  for (const auto& term : ps.terms()) {
    out.terms.push_back({autoint::bind(be, term.factor[0]), autoint::bind(be, term.factor[1]),
                         autoint::bind(be, term.factor[2])});
  }
  return out;
}

template <class Be>
typename Be::Value influence(Be& be, const BoundProdSum<Be>& ps,
                             const std::array<typename Be::Value, 3>& d) {
  using V = typename Be::Value;
  const DerivSpec first{{0}};
  std::optional<V> total;
  for (const auto& term : ps.terms) {
    V prod = autoint::dnforward(be, term[0], d[0], first);
    for (int k = 1; k < 3; ++k) prod = mul(prod, autoint::dnforward(be, term[k], d[k], first));
    total = total ? add(*total, prod) : prod;
  }
  return *total;
}

template <class Be>
typename Be::Value box_integral(Be& be, const BoundProdSum<Be>& ps,
                                const std::array<typename Be::Value, 3>& lo,
                                const std::array<typename Be::Value, 3>& hi) {
  using V = typename Be::Value;
  std::optional<V> total;
  for (const auto& term : ps.terms) {
    std::optional<V> prod;
    for (int k = 0; k < 3; ++k) {
      V diff = sub(autoint::integral_forward(be, term[k], hi[k]),
                   autoint::integral_forward(be, term[k], lo[k]));
      prod = prod ? mul(*prod, diff) : diff;
    }
    total = total ? add(*total, *prod) : *prod;
  }
  return *total;
}

template BoundProdSum<ValueBackend> bind(ValueBackend&, const ProdSum&);
template BoundProdSum<TapeBackend> bind(TapeBackend&, const ProdSum&);
template Tensor influence(ValueBackend&, const BoundProdSum<ValueBackend>&,
                          const std::array<Tensor, 3>&);
template Var influence(TapeBackend&, const BoundProdSum<TapeBackend>&, const std::array<Var, 3>&);
template Tensor box_integral(ValueBackend&, const BoundProdSum<ValueBackend>&,
                             const std::array<Tensor, 3>&, const std::array<Tensor, 3>&);
template Var box_integral(TapeBackend&, const BoundProdSum<TapeBackend>&, const std::array<Var, 3>&,
                          const std::array<Var, 3>&);

MlpSpec ConstrainedTriple::default_spec() {
  MlpSpec spec;
  spec.widths = {3, 32, 32, 1};
  spec.activation = autoint::Activation(autoint::ActivationKind::SoftplusCubed);
  spec.weights = autoint::WeightMode::NonNegative;
  return spec;
}

ConstrainedTriple::ConstrainedTriple(ParamSet params) : params_(std::move(params)) {
  const MlpSpec& spec = params_.spec();
  if (spec.input_dim() != 3) throw DomainError("constrained triple network takes (x, y, t)");
  if (!spec.activation.nonnegative_derivatives()) {
    throw DomainError("activation '" + std::string(spec.activation.name()) +
                      "' has a sign-changing derivative of order <= 3");
  }
  if (spec.weights != autoint::WeightMode::NonNegative) {
    throw DomainError("constrained triple network needs nonnegative weights");
  }
}

ConstrainedTriple ConstrainedTriple::init(const MlpSpec& spec, Rng& rng) {
  return ConstrainedTriple(ParamSet::init(spec, rng));
}

double ConstrainedTriple::influence(double x, double y, double t) const {
  return influence(Tensor({1, 3}, {x, y, t})).item();
}

Tensor ConstrainedTriple::influence(const Tensor& x) const {
  return autoint::dnforward(params_, x, {{0, 1, 2}});
}

}  // namespace autostpp::prodnet
