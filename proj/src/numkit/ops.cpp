#include "autostpp/numkit/ops.hpp"

#include <cmath>
#include <string>

#include "autostpp/errors.hpp"
#include "autostpp/numkit/kernels.hpp"

namespace autostpp::numkit {
namespace {

const kernels::KernelTable& K() { return kernels::active(); }

[[noreturn]] void mismatch(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": shape " + shape_str(a.shape()) + " does not conform to " +
                   shape_str(b.shape()));
}

std::size_t require_rank2(const char* op, const Tensor& a) {
  if (a.rank() != 2) {
    throw ShapeError(std::string(op) + ": expected a rank-2 tensor, got " + shape_str(a.shape()));
  }
  return a.shape()[0];
}

using Kernel = void (*)(const double*, const double*, double*, std::size_t);

template <class ScalarOp>
Tensor binary(const char* op, const Tensor& a, const Tensor& b, Kernel kernel, ScalarOp f) {
  if (a.shape() == b.shape()) {
    Tensor out(a.shape());
    kernel(a.ptr(), b.ptr(), out.ptr(), a.size());
    return out;
  }
  if (b.is_scalar()) {
    Tensor out(a.shape());
    const double s = b[0];
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], s);
    return out;
  }
  if (a.is_scalar()) {
    Tensor out(b.shape());
    const double s = a[0];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = f(s, b[i]);
    return out;
  }
  mismatch(op, a, b);
}

template <class F>
Tensor unary(const Tensor& a, F f) {
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
  return out;
}

}  // namespace

double sigmoid_scalar(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus_scalar(double x) {
  if (x > 30.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

Tensor add(const Tensor& a, const Tensor& b) {
  return binary("add", a, b, K().add, [](double x, double y) { return x + y; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary("sub", a, b, K().sub, [](double x, double y) { return x - y; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary("mul", a, b, K().mul, [](double x, double y) { return x * y; });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor scale(const Tensor& a, double s) {
  Tensor out(a.shape());
  K().affine(a.ptr(), s, 0.0, out.ptr(), a.size());
  return out;
}

Tensor add_scalar(const Tensor& a, double s) {
  Tensor out(a.shape());
  K().affine(a.ptr(), 1.0, s, out.ptr(), a.size());
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  const std::size_t m = require_rank2("matmul", a);
  require_rank2("matmul", b);
  const std::size_t k = a.shape()[1];
  if (b.shape()[0] != k) mismatch("matmul", a, b);
  const std::size_t n = b.shape()[1];
  Tensor out({m, n});
  K().gemm_nn_acc(a.ptr(), b.ptr(), out.ptr(), m, n, k);
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  const std::size_t m = require_rank2("matmul_nt", a);
  const std::size_t n = require_rank2("matmul_nt", b);
  const std::size_t k = a.shape()[1];
  if (b.shape()[1] != k) mismatch("matmul_nt", a, b);
  Tensor out({m, n});
  K().gemm_nt(a.ptr(), b.ptr(), out.ptr(), m, n, k);
  return out;
}

Tensor transpose(const Tensor& a) {
  const std::size_t m = require_rank2("transpose", a);
  const std::size_t n = a.shape()[1];
  Tensor out({n, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a[i * n + j];
  }
  return out;
}

Tensor add_bias(const Tensor& a, const Tensor& b) {
  const std::size_t m = require_rank2("add_bias", a);
  const std::size_t n = a.shape()[1];
  if (b.size() != n) mismatch("add_bias", a, b);
  Tensor out(a.shape());
  for (std::size_t i = 0; i < m; ++i) K().add(a.ptr() + i * n, b.ptr(), out.ptr() + i * n, n);
  return out;
}

Tensor tanh(const Tensor& a) {
  Tensor out(a.shape());
  K().tanh(a.ptr(), out.ptr(), a.size());
  return out;
}

Tensor sigmoid(const Tensor& a) { return unary(a, sigmoid_scalar); }

Tensor softplus(const Tensor& a) { return unary(a, softplus_scalar); }

Tensor exp(const Tensor& a) {
  Tensor out = unary(a, [](double x) { return std::exp(x); });
  if (!out.all_finite()) throw NumericError("exp overflowed");
  return out;
}

Tensor log(const Tensor& a) {
  for (double v : a.data()) {
    if (!(v > 0.0)) throw DomainError("log of non-positive value " + std::to_string(v));
  }
  return unary(a, [](double x) { return std::log(x); });
}

Tensor sqrt(const Tensor& a) {
  for (double v : a.data()) {
    if (!(v > 0.0)) throw DomainError("sqrt of non-positive value " + std::to_string(v));
  }
  return unary(a, [](double x) { return std::sqrt(x); });
}

Tensor square(const Tensor& a) {
  Tensor out(a.shape());
  K().mul(a.ptr(), a.ptr(), out.ptr(), a.size());
  return out;
}

Tensor sum(const Tensor& a) { return Tensor::scalar(K().sum(a.ptr(), a.size())); }

Tensor tile_rows(const Tensor& row, std::size_t n) {
  if (row.rows() != 1) {
    throw ShapeError("tile_rows: expected a single row, got " + shape_str(row.shape()));
  }
  const std::size_t c = row.size();
  Tensor out({n, c});
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(row.ptr(), row.ptr() + c, out.ptr() + i * c);
  }
  return out;
}

Tensor column_as_row(const Tensor& w, std::size_t j) {
  const std::size_t r = require_rank2("column_as_row", w);
  const std::size_t c = w.shape()[1];
  if (j >= c) {
    throw ShapeError("column_as_row: column " + std::to_string(j) + " out of range for " +
                     shape_str(w.shape()));
  }
  Tensor out({1, r});
  for (std::size_t i = 0; i < r; ++i) out[i] = w[i * c + j];
  return out;
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const std::size_t c = parts[0].cols();
  std::size_t r = 0;
  for (const auto& p : parts) {
    if (p.rank() != 2 || p.cols() != c) mismatch("concat_rows", parts[0], p);
    r += p.rows();
  }
  Tensor out({r, c});
  double* dst = out.ptr();
  for (const auto& p : parts) {
    std::copy(p.ptr(), p.ptr() + p.size(), dst);
    dst += p.size();
  }
  return out;
}

Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t end) {
  require_rank2("slice_rows", a);
  if (begin > end || end > a.rows()) {
    throw ShapeError("slice_rows: [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") out of range for " + shape_str(a.shape()));
  }
  const std::size_t c = a.cols();
  Tensor out({end - begin, c});
  std::copy(a.ptr() + begin * c, a.ptr() + end * c, out.ptr());
  return out;
}

Tensor gather_rows(const Tensor& a, std::span<const std::size_t> rows) {
  require_rank2("gather_rows", a);
  const std::size_t c = a.cols();
  Tensor out({rows.size(), c});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= a.rows()) throw ShapeError("gather_rows: row index out of range");
    std::copy(a.ptr() + rows[i] * c, a.ptr() + (rows[i] + 1) * c, out.ptr() + i * c);
  }
  return out;
}

Tensor segment_sum(const Tensor& a, std::span<const std::size_t> segment,
                   std::size_t n_segments) {
  require_rank2("segment_sum", a);
  if (segment.size() != a.rows()) {
    throw ShapeError("segment_sum: " + std::to_string(segment.size()) +
                     " segment ids for tensor " + shape_str(a.shape()));
  }
  const std::size_t c = a.cols();
  Tensor out({n_segments, c});
  for (std::size_t i = 0; i < segment.size(); ++i) {
    if (segment[i] >= n_segments) throw ShapeError("segment_sum: segment id out of range");
    K().add(out.ptr() + segment[i] * c, a.ptr() + i * c, out.ptr() + segment[i] * c, c);
  }
  return out;
}

}  // namespace autostpp::numkit
