#include "autostpp/numkit/kernels.hpp"

#include <cmath>

namespace autostpp::numkit::kernels {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_acc(const double* a, const double* b, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += a[i] * b[i];
}

void affine(const double* a, double s, double c, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = s * a[i] + c;
}

void gemm_nt(const double* A, const double* B, double* C, std::size_t m, std::size_t n,
             std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) C[i * n + j] = dot(A + i * k, B + j * k, k);
  }
}

void gemm_nn_acc(const double* A, const double* B, double* C, std::size_t m, std::size_t n,
                 std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) axpy(A[i * k + p], B + p * n, C + i * n, n);
  }
}

void gemm_tn_acc(const double* A, const double* B, double* C, std::size_t m, std::size_t n,
                 std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) axpy(A[i * k + p], B + i * n, C + p * n, n);
  }
}

void tanh(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(a[i]);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", dot,     sum,     axpy,    add,
                                 sub,      mul,     mul_acc, affine,  tanh,
                                 gemm_nt,  gemm_nn_acc, gemm_tn_acc};
  return table;
}

}  // namespace autostpp::numkit::kernels
