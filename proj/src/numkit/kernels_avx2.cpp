// Compiled with -mavx2 -mfma on x86-64; only reached through avx2_table()
// after a CPU feature check.

#include "autostpp/numkit/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace autostpp::numkit::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_acc(const double* a, const double* b, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                                              _mm256_loadu_pd(acc + i)));
  }
  for (; i < n; ++i) acc[i] += a[i] * b[i];
}

void affine(const double* a, double s, double c, double* out, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vs, _mm256_loadu_pd(a + i), vc));
  }
  for (; i < n; ++i) out[i] = s * a[i] + c;
}

inline __m256d polevl2(__m256d x, double c0, double c1, double c2) {
  return _mm256_fmadd_pd(_mm256_fmadd_pd(_mm256_set1_pd(c0), x, _mm256_set1_pd(c1)), x,
                         _mm256_set1_pd(c2));
}

inline __m256d polevl3(__m256d x, double c0, double c1, double c2, double c3) {
  return _mm256_fmadd_pd(polevl2(x, c0, c1, c2), x, _mm256_set1_pd(c3));
}

// exp(x) for x in [0, 64]: x = n ln2 + r, |r| <= ln2 / 2, Pade form for
// exp(r), then scale by 2^n through the exponent bits (Cephes coefficients).
inline __m256d exp_small_range(__m256d x) {
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125e-1), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212e-6), r);
  const __m256d rr = _mm256_mul_pd(r, r);
  const __m256d px = _mm256_mul_pd(
      r, polevl2(rr, 1.26177193074810590878e-4, 3.02994407707441961300e-2, 9.99999999999999999910e-1));
  const __m256d qx = polevl3(rr, 3.00198505138664455042e-6, 2.52448340349684104192e-3,
                             2.27265548208155028766e-1, 2.00000000000000000009e0);
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));
  const __m256i ni = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
}

// Cephes tanh: rational approximation below 0.625, 1 - 2 / (e^{2|x|} + 1)
// above; both evaluated and blended per lane.
inline __m256d tanh4(__m256d x) {
  const __m256d sign = _mm256_and_pd(x, _mm256_set1_pd(-0.0));
  // min_pd returns its second operand when either is NaN, so NaN propagates.
  const __m256d ax = _mm256_min_pd(_mm256_set1_pd(22.0), _mm256_andnot_pd(_mm256_set1_pd(-0.0), x));

  const __m256d z = _mm256_mul_pd(ax, ax);
  const __m256d p = polevl2(z, -9.64399179425052238628e-1, -9.92877231001918586564e1,
                            -1.61468768441708447952e3);
  const __m256d q = _mm256_fmadd_pd(
      _mm256_fmadd_pd(_mm256_add_pd(z, _mm256_set1_pd(1.12811678491632931402e2)), z,
                      _mm256_set1_pd(2.23548839060100448583e3)),
      z, _mm256_set1_pd(4.84406305325125486048e3));
  const __m256d small = _mm256_fmadd_pd(_mm256_mul_pd(ax, z), _mm256_div_pd(p, q), ax);

  const __m256d e = exp_small_range(_mm256_add_pd(ax, ax));
  const __m256d large =
      _mm256_sub_pd(_mm256_set1_pd(1.0),
                    _mm256_div_pd(_mm256_set1_pd(2.0), _mm256_add_pd(e, _mm256_set1_pd(1.0))));

  const __m256d use_small = _mm256_cmp_pd(ax, _mm256_set1_pd(0.625), _CMP_LT_OQ);
  return _mm256_or_pd(_mm256_blendv_pd(large, small, use_small), sign);
}

void tanh(const double* a, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, tanh4(_mm256_loadu_pd(a + i)));
  if (i < n) {
    double buf[4] = {0, 0, 0, 0};
    for (std::size_t j = i; j < n; ++j) buf[j - i] = a[j];
    _mm256_storeu_pd(buf, tanh4(_mm256_loadu_pd(buf)));
    for (std::size_t j = i; j < n; ++j) out[j] = buf[j - i];
  }
}


// Four output columns per pass so each row of A is streamed once per block.
void gemm_nt(const double* A, const double* B, double* C, std::size_t m, std::size_t n,
             std::size_t k) {
  if (k < 4) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t p = 0; p < k; ++p) s += A[i * k + p] * B[j * k + p];
        C[i * n + j] = s;
      }
    }
    return;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = A + i * k;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const double* b0 = B + j * k;
      const double* b1 = b0 + k;
      const double* b2 = b1 + k;
      const double* b3 = b2 + k;
      __m256d c0 = _mm256_setzero_pd(), c1 = _mm256_setzero_pd();
      __m256d c2 = _mm256_setzero_pd(), c3 = _mm256_setzero_pd();
      std::size_t p = 0;
      for (; p + 4 <= k; p += 4) {
        const __m256d va = _mm256_loadu_pd(a + p);
        c0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b0 + p), c0);
        c1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b1 + p), c1);
        c2 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b2 + p), c2);
        c3 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b3 + p), c3);
      }
      double s0 = hsum(c0), s1 = hsum(c1), s2 = hsum(c2), s3 = hsum(c3);
      for (; p < k; ++p) {
        s0 += a[p] * b0[p];
        s1 += a[p] * b1[p];
        s2 += a[p] * b2[p];
        s3 += a[p] * b3[p];
      }
      double* c = C + i * n + j;
      c[0] = s0;
      c[1] = s1;
      c[2] = s2;
      c[3] = s3;
    }
    for (; j < n; ++j) C[i * n + j] = dot(a, B + j * k, k);
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

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{"avx2",  dot,     sum,     axpy,    add,
                                 sub,     mul,     mul_acc, affine,  tanh,
                                 gemm_nt, gemm_nn_acc, gemm_tn_acc};
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &table : nullptr;
}

}  // namespace autostpp::numkit::kernels

#else

namespace autostpp::numkit::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace autostpp::numkit::kernels

#endif
