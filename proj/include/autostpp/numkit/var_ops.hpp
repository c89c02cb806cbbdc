#pragma once

// Recorded counterparts of ops.hpp. Each records its exact vector-Jacobian
// product. All operands must live on the same tape.

#include <span>
#include <vector>

#include "autostpp/numkit/tape.hpp"

namespace autostpp::numkit {

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var neg(const Var& a);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);

Var matmul(const Var& a, const Var& b);
Var matmul_nt(const Var& a, const Var& b);
Var transpose(const Var& a);
Var add_bias(const Var& a, const Var& b);

Var tanh(const Var& a);
Var sigmoid(const Var& a);
Var softplus(const Var& a);
Var exp(const Var& a);
Var log(const Var& a);
Var sqrt(const Var& a);
Var square(const Var& a);
Var sum(const Var& a);

Var tile_rows(const Var& row, std::size_t n);
Var column_as_row(const Var& w, std::size_t j);
Var concat_rows(std::span<const Var> parts);
Var slice_rows(const Var& a, std::size_t begin, std::size_t end);
Var gather_rows(const Var& a, std::span<const std::size_t> rows);
Var segment_sum(const Var& a, std::span<const std::size_t> segment, std::size_t n_segments);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }
inline Var operator-(const Var& a) { return neg(a); }

}  // namespace autostpp::numkit
