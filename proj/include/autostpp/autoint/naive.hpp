#pragma once

#include "autostpp/autoint/dnforward.hpp"

namespace autostpp::autoint {

/// Reference mixed partial built by symbolic differentiation of the network
/// expression, one axis at a time, then evaluated as a tree with no sharing.
///
/// Every product-rule branch recomputes its subtrees (including the forward
/// activations) so the cost grows with the expanded expression. It is the
/// baseline for the benchmark and an independent oracle for dnforward.
numkit::Tensor naive_dnforward(const ParamSet& params, const numkit::Tensor& x,
                               const DerivSpec& dims);

/// Number of nodes in the expanded derivative expression.
std::size_t naive_expression_size(const ParamSet& params, const DerivSpec& dims);

}  // namespace autostpp::autoint
