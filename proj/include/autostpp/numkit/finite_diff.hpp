#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "autostpp/numkit/tensor.hpp"

namespace autostpp::numkit {

using ScalarFn = std::function<double(const Tensor&)>;

/// Mixed partial d^|dims| f / dx_{dims[0]} ... dx_{dims[n-1]} at x by nested
/// central differences, one level per entry of `dims` (indices into x's
/// flattened data; repeats allowed). Truncation error is O(eps^2) per level;
/// round-off grows like eps^-|dims|.
double finite_diff(const ScalarFn& f, const Tensor& x, std::span<const std::size_t> dims,
                   double eps);

}  // namespace autostpp::numkit
