#include <cmath>
#include <vector>

#include "autostpp/numkit/kernels.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace autostpp;
using autostpp::numkit::kernels::KernelTable;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

// Reassociation and FMA contraction bound the gap by a few ulps of the
// absolute-value sum of the terms.
void check_close(const std::vector<double>& a, const std::vector<double>& b,
                 const std::vector<double>& scale) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i] - b[i]) <= 1e-14 * (scale[i] + 1.0));
  }
}

void compare_tables(const KernelTable& ref, const KernelTable& simd) {
  Rng rng(11, "kernels");
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 31u, 64u, 67u}) {
    auto a = random_vec(rng, n), b = random_vec(rng, n);
    double abs_dot = 0.0, abs_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      abs_dot += std::abs(a[i] * b[i]);
      abs_sum += std::abs(a[i]);
    }
    CHECK(std::abs(ref.dot(a.data(), b.data(), n) - simd.dot(a.data(), b.data(), n)) <=
          1e-14 * (abs_dot + 1.0));
    CHECK(std::abs(ref.sum(a.data(), n) - simd.sum(a.data(), n)) <= 1e-14 * (abs_sum + 1.0));

    std::vector<double> r(n), s(n), scale(n, 4.0);
    ref.add(a.data(), b.data(), r.data(), n);
    simd.add(a.data(), b.data(), s.data(), n);
    CHECK(r == s);
    ref.sub(a.data(), b.data(), r.data(), n);
    simd.sub(a.data(), b.data(), s.data(), n);
    CHECK(r == s);
    ref.mul(a.data(), b.data(), r.data(), n);
    simd.mul(a.data(), b.data(), s.data(), n);
    CHECK(r == s);

    r = b;
    s = b;
    ref.axpy(0.7, a.data(), r.data(), n);
    simd.axpy(0.7, a.data(), s.data(), n);
    check_close(r, s, scale);
    r = b;
    s = b;
    ref.mul_acc(a.data(), b.data(), r.data(), n);
    simd.mul_acc(a.data(), b.data(), s.data(), n);
    check_close(r, s, scale);
    ref.affine(a.data(), -1.3, 0.4, r.data(), n);
    simd.affine(a.data(), -1.3, 0.4, s.data(), n);
    check_close(r, s, scale);
  }

  // tanh across the small-argument branch, the exp branch, saturation and
  // signed zero, relative to std::tanh.
  std::vector<double> z{0.0, -0.0, 1e-300, -1e-12, 0.3, 0.6249, 0.625, -0.7, 1.0, 5.0, 18.0,
                        19.5, 22.0, -40.0, 700.0, -1e308};
  for (int i = 0; i < 20000; ++i) z.push_back(rng.uniform(-25.0, 25.0) * std::pow(10.0, rng.uniform(-6, 0)));
  std::vector<double> r(z.size()), s(z.size());
  ref.tanh(z.data(), r.data(), z.size());
  simd.tanh(z.data(), s.data(), z.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    worst = std::max(worst, std::abs(r[i] - s[i]) / std::max(std::abs(r[i]), 1e-300));
    CHECK(std::signbit(r[i]) == std::signbit(s[i]));
  }
  CHECK(worst < 4e-16);
  double nan_in = std::nan(""), nan_out = 0.0;
  simd.tanh(&nan_in, &nan_out, 1);
  CHECK(std::isnan(nan_out));

  for (auto [m, n, k] : {std::tuple{1u, 1u, 1u}, {5u, 3u, 1u}, {7u, 9u, 3u}, {16u, 16u, 16u},
                         {33u, 17u, 13u}, {4u, 64u, 64u}}) {
    auto A = random_vec(rng, m * k), B = random_vec(rng, n * k), Bnn = random_vec(rng, k * n);
    auto G = random_vec(rng, m * n);
    std::vector<double> r(m * n), s(m * n), scale(m * n, 4.0 * k);
    ref.gemm_nt(A.data(), B.data(), r.data(), m, n, k);
    simd.gemm_nt(A.data(), B.data(), s.data(), m, n, k);
    check_close(r, s, scale);
    std::fill(r.begin(), r.end(), 0.0);
    std::fill(s.begin(), s.end(), 0.0);
    ref.gemm_nn_acc(A.data(), Bnn.data(), r.data(), m, n, k);
    simd.gemm_nn_acc(A.data(), Bnn.data(), s.data(), m, n, k);
    check_close(r, s, scale);
    std::vector<double> rt(k * n, 0.0), st(k * n, 0.0), scale_t(k * n, 4.0 * m);
    ref.gemm_tn_acc(A.data(), G.data(), rt.data(), m, n, k);
    simd.gemm_tn_acc(A.data(), G.data(), st.data(), m, n, k);
    check_close(rt, st, scale_t);
  }
}

}  // namespace

TEST_CASE("scalar reference kernels compute what they claim") {
  const KernelTable& t = numkit::kernels::scalar_table();
  double a[] = {1, 2, 3}, b[] = {4, 5, 6};
  CHECK(t.dot(a, b, 3) == 32.0);
  CHECK(t.sum(a, 3) == 6.0);
  double A[] = {1, 2, 3, 4};  // [2,2]
  double C[4];
  t.gemm_nt(A, A, C, 2, 2, 2);  // A A^T
  CHECK(C[0] == 5.0);
  CHECK(C[1] == 11.0);
  CHECK(C[3] == 25.0);
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const KernelTable* simd = numkit::kernels::avx2_table();
  if (!simd) {
    MESSAGE("AVX2 variant unavailable on this machine; skipped");
    return;
  }
  compare_tables(numkit::kernels::scalar_table(), *simd);
}

TEST_CASE("active table is one of the known variants") {
  const auto& t = numkit::kernels::active();
  CHECK((t.name == "scalar" || t.name == "avx2"));
}
