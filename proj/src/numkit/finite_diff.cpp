#include "autostpp/numkit/finite_diff.hpp"

#include <stdexcept>
#include <string>

namespace autostpp::numkit {
namespace {

double nested(const ScalarFn& f, Tensor& x, std::span<const std::size_t> dims, double eps) {
  if (dims.empty()) return f(x);
  const std::size_t d = dims[0];
  const double saved = x[d];
  x[d] = saved + eps;
  const double hi = nested(f, x, dims.subspan(1), eps);
  x[d] = saved - eps;
  const double lo = nested(f, x, dims.subspan(1), eps);
  x[d] = saved;
  return (hi - lo) / (2.0 * eps);
}

}  // namespace

double finite_diff(const ScalarFn& f, const Tensor& x, std::span<const std::size_t> dims,
                   double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite_diff: eps must be positive");
  if (dims.empty()) throw std::invalid_argument("finite_diff: dims must be nonempty");
  for (auto d : dims) {
    if (d >= x.size()) {
      throw std::invalid_argument("finite_diff: axis " + std::to_string(d) + " out of range");
    }
  }
  Tensor work = x;
  return nested(f, work, dims, eps);
}

}  // namespace autostpp::numkit
