#pragma once

// Quadrature oracles shared by the tests. Everything here is independent of
// the closed-form paths under test: it only calls pointwise evaluators.

#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <functional>
#include <vector>

#include "autostpp/numkit/tensor.hpp"

namespace testsupport {

struct Rule {
  std::vector<double> nodes, weights;
};

// Composite Gauss-Legendre on [lo, hi] with `panels` panels of 20 points.
inline Rule gauss_legendre(double lo, double hi, int panels) {
  using G = boost::math::quadrature::gauss<double, 20>;
  Rule r;
  const double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * width, half = width / 2, mid = a + half;
    for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
      for (double sgn : {-1.0, 1.0}) {
        r.nodes.push_back(mid + sgn * half * G::abscissa()[i]);
        r.weights.push_back(half * G::weights()[i]);
      }
    }
  }
  return r;
}

// Batched integrand: columns x, y, t of shape [P, 1] to values [P, 1].
using BatchFn = std::function<autostpp::numkit::Tensor(const std::array<autostpp::numkit::Tensor, 3>&)>;

// Tensor-product Gauss-Legendre over a box, evaluated one x-slab at a time.
inline double gauss_legendre_3d(const BatchFn& f, std::array<double, 3> lo, std::array<double, 3> hi,
                                int panels) {
  using autostpp::numkit::Tensor;
  Rule r[3];
  for (int k = 0; k < 3; ++k) r[k] = gauss_legendre(lo[k], hi[k], panels);
  const std::size_t ny = r[1].nodes.size(), nt = r[2].nodes.size();
  double total = 0.0;
  for (std::size_t i = 0; i < r[0].nodes.size(); ++i) {
    Tensor x({ny * nt, 1}, r[0].nodes[i]), y({ny * nt, 1}), t({ny * nt, 1});
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t k = 0; k < nt; ++k) {
        y[j * nt + k] = r[1].nodes[j];
        t[j * nt + k] = r[2].nodes[k];
      }
    }
    Tensor v = f({x, y, t});
    double slab = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t k = 0; k < nt; ++k) slab += r[1].weights[j] * r[2].weights[k] * v[j * nt + k];
    }
    total += r[0].weights[i] * slab;
  }
  return total;
}

}  // namespace testsupport
