#pragma once

// Data-parallel inner loops behind the tensor ops.
//
// Every variant implements the same table. The scalar table is the reference;
// the AVX2 table (x86-64 with AVX2+FMA) is selected at runtime when the CPU
// supports it. Results agree with the reference to rounding (FMA contraction
// and reassociated reductions), not bit-for-bit. Within one process the chosen
// table never changes, so repeated runs are bit-identical.
//
// Set AUTOSTPP_SIMD=scalar to force the reference path.

#include <cstddef>
#include <string_view>

namespace autostpp::numkit::kernels {

struct KernelTable {
  std::string_view name;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i a[i]
  double (*sum)(const double* a, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out = a + b, a - b, a * b (out may alias a or b)
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // acc += a * b
  void (*mul_acc)(const double* a, const double* b, double* acc, std::size_t n);
  // out = s * a + c
  void (*affine)(const double* a, double s, double c, double* out, std::size_t n);
  // out = tanh(a), within a few ulp of std::tanh
  void (*tanh)(const double* a, double* out, std::size_t n);

  // C[m,n] = A[m,k] * B[n,k]^T
  void (*gemm_nt)(const double* A, const double* B, double* C, std::size_t m,
                  std::size_t n, std::size_t k);
  // C[m,n] += A[m,k] * B[k,n]
  void (*gemm_nn_acc)(const double* A, const double* B, double* C, std::size_t m,
                      std::size_t n, std::size_t k);
  // C[k,n] += A[m,k]^T * B[m,n]
  void (*gemm_tn_acc)(const double* A, const double* B, double* C, std::size_t m,
                      std::size_t n, std::size_t k);
};

const KernelTable& scalar_table();

// nullptr when the AVX2 variant is not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

// Table picked once per process.
const KernelTable& active();

}  // namespace autostpp::numkit::kernels
