#pragma once

// Eager tensor primitives. Each has a recorded twin in var_ops.hpp with the
// same name and signature, so model code can be written once against either.
//
// Elementwise binary ops require equal shapes, or one operand with a single
// element (scalar broadcast). Nothing else broadcasts; bias addition and
// row tiling are explicit ops.

#include <cstddef>
#include <span>
#include <vector>

#include "autostpp/numkit/tensor.hpp"

namespace autostpp::numkit {

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);

// [m,k] x [k,n]
Tensor matmul(const Tensor& a, const Tensor& b);
// [m,k] x [n,k]^T, the layout of a linear layer with weights [out, in]
Tensor matmul_nt(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
// a[m,n] + b broadcast over rows; b has n elements
Tensor add_bias(const Tensor& a, const Tensor& b);

Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor softplus(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor square(const Tensor& a);

// Sum of all elements, shape {1}.
Tensor sum(const Tensor& a);

// n copies of a one-row tensor, [n, c].
Tensor tile_rows(const Tensor& row, std::size_t n);
// Column j of w[r,c] as a row [1, r].
Tensor column_as_row(const Tensor& w, std::size_t j);
Tensor concat_rows(std::span<const Tensor> parts);
Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t end);
Tensor gather_rows(const Tensor& a, std::span<const std::size_t> rows);
// out[segment[i]] += a[i] for each row i; out has n_segments rows.
Tensor segment_sum(const Tensor& a, std::span<const std::size_t> segment,
                   std::size_t n_segments);

// Scalar softplus with overflow-safe branches; shared by activations.
double softplus_scalar(double x);
double sigmoid_scalar(double x);

}  // namespace autostpp::numkit
