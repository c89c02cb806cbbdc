#include "autostpp/autoint/activation.hpp"

#include <array>
#include <cmath>
#include <string>

#include "autostpp/errors.hpp"
#include "autostpp/numkit/kernels.hpp"
#include "autostpp/numkit/ops.hpp"

namespace autostpp::autoint {
namespace {

using Orders = std::array<double, Activation::kMaxInternalOrder + 1>;

// Orders from t = tanh(z).
void tanh_orders_from(double t, int max_order, Orders& d) {
  const double u = 1.0 - t * t;
  d[0] = t;
  if (max_order >= 1) d[1] = u;
  if (max_order >= 2) d[2] = -2.0 * t * u;
  if (max_order >= 3) d[3] = -2.0 * u * (1.0 - 3.0 * t * t);
  if (max_order >= 4) d[4] = 8.0 * t * u * (2.0 - 3.0 * t * t);
}

void tanh_orders(double z, int max_order, Orders& d) { tanh_orders_from(std::tanh(z), max_order, d); }

// Derivatives of softplus: s' = p, s'' = p(1-p), ...
void softplus_orders(double z, int max_order, Orders& d) {
  const double p = numkit::sigmoid_scalar(z);
  const double q = p * (1.0 - p);
  d[0] = numkit::softplus_scalar(z);
  if (max_order >= 1) d[1] = p;
  if (max_order >= 2) d[2] = q;
  if (max_order >= 3) d[3] = q * (1.0 - 2.0 * p);
  if (max_order >= 4) d[4] = q * (1.0 - 6.0 * p + 6.0 * p * p);
}

// Faa di Bruno for h(s(z)) with h(s) = s^3.
void softplus_cubed_orders(double z, int max_order, Orders& d) {
  Orders s{};
  softplus_orders(z, max_order, s);
  const double v = s[0];
  d[0] = v * v * v;
  if (max_order >= 1) d[1] = 3.0 * v * v * s[1];
  if (max_order >= 2) d[2] = 6.0 * v * s[1] * s[1] + 3.0 * v * v * s[2];
  if (max_order >= 3) {
    d[3] = 6.0 * s[1] * s[1] * s[1] + 18.0 * v * s[1] * s[2] + 3.0 * v * v * s[3];
  }
  if (max_order >= 4) {
    d[4] = 36.0 * s[1] * s[1] * s[2] + 6.0 * v * (3.0 * s[2] * s[2] + 4.0 * s[1] * s[3]) +
           3.0 * v * v * s[4];
  }
}

void check_order(int order) {
  if (order < 0 || order > Activation::kMaxInternalOrder) {
    throw DomainError("activation derivative of order " + std::to_string(order) +
                      " is not available (maximum " +
                      std::to_string(Activation::kMaxInternalOrder) + ")");
  }
}

}  // namespace

Activation Activation::from_name(std::string_view name) {
  if (name == "tanh") return Activation(ActivationKind::Tanh);
  if (name == "softplus") return Activation(ActivationKind::Softplus);
  if (name == "softplus_cubed") return Activation(ActivationKind::SoftplusCubed);
  throw DataError("unknown activation '" + std::string(name) + "'");
}

std::string_view Activation::name() const {
  switch (kind_) {
    case ActivationKind::Tanh: return "tanh";
    case ActivationKind::Softplus: return "softplus";
    case ActivationKind::SoftplusCubed: return "softplus_cubed";
  }
  return "?";
}

double Activation::derivative(double z, int order) const {
  check_order(order);
  Orders d{};
  switch (kind_) {
    case ActivationKind::Tanh: tanh_orders(z, order, d); break;
    case ActivationKind::Softplus: softplus_orders(z, order, d); break;
    case ActivationKind::SoftplusCubed: softplus_cubed_orders(z, order, d); break;
  }
  return d[order];
}

namespace {

template <class Fn>
void sweep(const numkit::Tensor& z, int max_order, std::vector<numkit::Tensor>& out, Fn orders) {
  Orders d{};
  for (std::size_t i = 0; i < z.size(); ++i) {
    orders(z[i], max_order, d);
    for (int k = 0; k <= max_order; ++k) out[k][i] = d[k];
  }
}

}  // namespace

std::vector<numkit::Tensor> Activation::derivatives(const numkit::Tensor& z, int max_order) const {
  check_order(max_order);
  std::vector<numkit::Tensor> out(max_order + 1, numkit::Tensor(z.shape()));
  switch (kind_) {
    case ActivationKind::Tanh: {
      // Vectorised tanh first, then the polynomial orders in t.
      numkit::kernels::active().tanh(z.ptr(), out[0].ptr(), z.size());
      Orders d{};
      for (std::size_t i = 0; i < z.size(); ++i) {
        tanh_orders_from(out[0][i], max_order, d);
        for (int k = 1; k <= max_order; ++k) out[k][i] = d[k];
      }
      break;
    }
    case ActivationKind::Softplus: sweep(z, max_order, out, softplus_orders); break;
    case ActivationKind::SoftplusCubed: sweep(z, max_order, out, softplus_cubed_orders); break;
  }
  return out;
}

}  // namespace autostpp::autoint
