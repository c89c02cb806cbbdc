#pragma once

#include <algorithm>
#include <cmath>

#include "autostpp/numkit/tensor.hpp"
#include "autostpp/rng.hpp"

namespace testsupport {

using autostpp::numkit::Shape;
using autostpp::numkit::Tensor;

// |a - b| relative to |b|, with `floor` guarding values near zero.
inline double rel_err(double a, double b, double floor = 1e-3) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

inline Tensor random_tensor(autostpp::Rng& rng, Shape shape, double lo = -2.0, double hi = 2.0) {
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

}  // namespace testsupport
