#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "autostpp/autoint/dnforward.hpp"
#include "autostpp/autoint/mlp.hpp"
#include "autostpp/rng.hpp"
#include "json.hpp"

namespace autostpp::prodnet {

/// Axis-aligned box in (x, y, t).
struct Cuboid {
  std::array<double, 3> lo{0, 0, 0};
  std::array<double, 3> hi{1, 1, 1};

  // DomainError unless lo < hi on every axis.
  void validate() const;
  double volume() const;
};

/// One product term: univariate integral networks for x, y and t.
struct ProdTerm {
  std::array<autoint::ParamSet, 3> factor;

  friend bool operator==(const ProdTerm&, const ProdTerm&) = default;
};

/// Influence f(dx, dy, dt) = sum_i f1_i(dx) f2_i(dy) f3_i(dt) where f^k_i is
/// the derivative of the univariate integral network F^k_i. Its triple
/// antiderivative is sum_i F1_i F2_i F3_i, so box integrals are closed form.
class ProdSum {
 public:
  ProdSum() = default;
  explicit ProdSum(std::vector<ProdTerm> terms);

  // widths {1, 16, 16, 1}, tanh, bias, nonnegative weights
  static autoint::MlpSpec default_factor_spec();
  static ProdSum init(std::size_t n_terms, const autoint::MlpSpec& factor_spec, Rng& rng);

  std::size_t size() const { return terms_.size(); }
  const std::vector<ProdTerm>& terms() const { return terms_; }
  std::vector<ProdTerm>& terms() { return terms_; }

  // Every factor has nonnegative weights and a monotone activation, so every
  // f^k is >= 0 and so is the influence.
  bool constrained() const;

  double influence(double dx, double dy, double dt) const;
  double antideriv(double x, double y, double t) const;
  // DomainError on a degenerate cuboid.
  double cuboid_integral(const Cuboid& c) const;

  std::vector<numkit::Tensor*> tensors();
  std::vector<const numkit::Tensor*> tensors() const;

  friend bool operator==(const ProdSum&, const ProdSum&) = default;

 private:
  std::vector<ProdTerm> terms_;
};

// {"N": n, "terms": [{"x": ParamSet, "y": ..., "t": ...}, ...]}
void to_json(nlohmann::json& j, const ProdSum& p);
void from_json(const nlohmann::json& j, ProdSum& p);

/// Backend-bound form for batched evaluation.
template <class Be>
struct BoundProdSum {
  std::vector<std::array<autoint::BoundMlp<Be>, 3>> terms;
};

template <class Be>
BoundProdSum<Be> bind(Be& be, const ProdSum& ps);

/// Influence at displacements d[k] of shape [P, 1]; returns [P, 1].
template <class Be>
typename Be::Value influence(Be& be, const BoundProdSum<Be>& ps,
                             const std::array<typename Be::Value, 3>& d);

/// Integral over the boxes [lo[k], hi[k]] (each [P, 1]); returns [P, 1].
template <class Be>
typename Be::Value box_integral(Be& be, const BoundProdSum<Be>& ps,
                                const std::array<typename Be::Value, 3>& lo,
                                const std::array<typename Be::Value, 3>& hi);

extern template BoundProdSum<autoint::ValueBackend> bind(autoint::ValueBackend&, const ProdSum&);
extern template BoundProdSum<autoint::TapeBackend> bind(autoint::TapeBackend&, const ProdSum&);
extern template numkit::Tensor influence(autoint::ValueBackend&,
                                         const BoundProdSum<autoint::ValueBackend>&,
                                         const std::array<numkit::Tensor, 3>&);
extern template numkit::Var influence(autoint::TapeBackend&,
                                      const BoundProdSum<autoint::TapeBackend>&,
                                      const std::array<numkit::Var, 3>&);
extern template numkit::Tensor box_integral(autoint::ValueBackend&,
                                            const BoundProdSum<autoint::ValueBackend>&,
                                            const std::array<numkit::Tensor, 3>&,
                                            const std::array<numkit::Tensor, 3>&);
extern template numkit::Var box_integral(autoint::TapeBackend&,
                                         const BoundProdSum<autoint::TapeBackend>&,
                                         const std::array<numkit::Var, 3>&,
                                         const std::array<numkit::Var, 3>&);

/// Single trivariate integral network whose triple mixed partial is the
/// influence. Nonnegative weights and an activation whose first three
/// derivatives are nonnegative (softplus cubed) make every term of the
/// Faa di Bruno expansion nonnegative. Comparator for the product form.
class ConstrainedTriple {
 public:
  // widths {3, 32, 32, 1}, softplus_cubed, nonnegative weights
  static autoint::MlpSpec default_spec();

  // DomainError if the spec cannot guarantee a nonnegative triple derivative.
  explicit ConstrainedTriple(autoint::ParamSet params);
  static ConstrainedTriple init(const autoint::MlpSpec& spec, Rng& rng);

  const autoint::ParamSet& params() const { return params_; }
  autoint::ParamSet& params() { return params_; }

  double influence(double x, double y, double t) const;
  // x is [P, 3]; returns [P, 1].
  numkit::Tensor influence(const numkit::Tensor& x) const;

 private:
  autoint::ParamSet params_;
};

}  // namespace autostpp::prodnet
