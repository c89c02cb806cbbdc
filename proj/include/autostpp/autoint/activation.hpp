#pragma once

#include <string_view>
#include <vector>

#include "autostpp/numkit/tensor.hpp"

namespace autostpp::autoint {

enum class ActivationKind { Tanh, Softplus, SoftplusCubed };

/// Elementwise activation with analytic derivatives.
///
/// Orders 0..3 are available to derivative networks. Order 4 exists only so the
/// tape can differentiate an order-3 term with respect to the weights.
///
/// SoftplusCubed is softplus(z)^3. Its first three derivatives are
/// nonnegative everywhere, which together with nonnegative weights makes every
/// mixed partial of order <= 3 of the network nonnegative.
class Activation {
 public:
  static constexpr int kMaxOrder = 3;
  static constexpr int kMaxInternalOrder = 4;

  explicit Activation(ActivationKind kind = ActivationKind::Tanh) : kind_(kind) {}
  static Activation from_name(std::string_view name);

  ActivationKind kind() const { return kind_; }
  std::string_view name() const;

  // sigma' >= 0 everywhere
  bool monotone() const { return true; }
  // sigma', sigma'', sigma''' >= 0 everywhere
  bool nonnegative_derivatives() const { return kind_ == ActivationKind::SoftplusCubed; }

  double derivative(double z, int order) const;

  // out[k] = sigma^(k)(z) for k = 0..max_order, computed in one sweep.
  std::vector<numkit::Tensor> derivatives(const numkit::Tensor& z, int max_order) const;

  friend bool operator==(const Activation&, const Activation&) = default;

 private:
  ActivationKind kind_;
};

}  // namespace autostpp::autoint
