#include "autostpp/numkit/var_ops.hpp"

#include <memory>

#include "autostpp/numkit/ops.hpp"

namespace autostpp::numkit {
namespace {

// Gradient of a scalar-broadcast operand is the sum of the incoming gradient.
Tensor reduce_to(const Tensor& g, const Shape& shape) {
  if (g.shape() == shape) return g;
  return sum(g).reshaped(shape);
}

Tape& tape_of(const Var& a) { return *a.tape; }

}  // namespace

Var add(const Var& a, const Var& b) {
  Shape sa = a.shape(), sb = b.shape();
  return tape_of(a).record(add(a.value(), b.value()), {a, b},
                           [a, b, sa, sb](const Tensor& g, GradSink& s) {
                             s.accumulate(a.id, reduce_to(g, sa));
                             s.accumulate(b.id, reduce_to(g, sb));
                           });
}

Var sub(const Var& a, const Var& b) {
  Shape sa = a.shape(), sb = b.shape();
  return tape_of(a).record(sub(a.value(), b.value()), {a, b},
                           [a, b, sa, sb](const Tensor& g, GradSink& s) {
                             s.accumulate(a.id, reduce_to(g, sa));
                             s.accumulate(b.id, reduce_to(neg(g), sb));
                           });
}

Var mul(const Var& a, const Var& b) {
  return tape_of(a).record(mul(a.value(), b.value()), {a, b}, [a, b](const Tensor& g, GradSink& s) {
    s.accumulate(a.id, reduce_to(mul(g, b.value()), a.shape()));
    s.accumulate(b.id, reduce_to(mul(g, a.value()), b.shape()));
  });
}

Var neg(const Var& a) { return scale(a, -1.0); }

Var scale(const Var& a, double k) {
  return tape_of(a).record(scale(a.value(), k), {a},
                           [a, k](const Tensor& g, GradSink& s) { s.accumulate(a.id, scale(g, k)); });
}

Var add_scalar(const Var& a, double k) {
  return tape_of(a).record(add_scalar(a.value(), k), {a},
                           [a](const Tensor& g, GradSink& s) { s.accumulate(a.id, g); });
}

Var matmul(const Var& a, const Var& b) {
  return tape_of(a).record(matmul(a.value(), b.value()), {a, b}, [a, b](const Tensor& g, GradSink& s) {
    s.accumulate(a.id, matmul_nt(g, b.value()));
    s.accumulate(b.id, matmul(transpose(a.value()), g));
  });
}

Var matmul_nt(const Var& a, const Var& b) {
  return tape_of(a).record(matmul_nt(a.value(), b.value()), {a, b},
                           [a, b](const Tensor& g, GradSink& s) {
                             s.accumulate(a.id, matmul(g, b.value()));
                             s.accumulate(b.id, matmul(transpose(g), a.value()));
                           });
}

Var transpose(const Var& a) {
  return tape_of(a).record(transpose(a.value()), {a},
                           [a](const Tensor& g, GradSink& s) { s.accumulate(a.id, transpose(g)); });
}

Var add_bias(const Var& a, const Var& b) {
  return tape_of(a).record(add_bias(a.value(), b.value()), {a, b},
                           [a, b](const Tensor& g, GradSink& s) {
                             s.accumulate(a.id, g);
                             const std::size_t m = g.rows(), n = g.cols();
                             Tensor gb(b.shape());
                             for (std::size_t i = 0; i < m; ++i) {
                               for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j];
                             }
                             s.accumulate(b.id, std::move(gb));
                           });
}

Var tanh(const Var& a) {
  Tensor y = tanh(a.value());
  auto saved = std::make_shared<Tensor>(y);
  return tape_of(a).record(std::move(y), {a}, [a, saved](const Tensor& g, GradSink& s) {
    Tensor d(saved->shape());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = g[i] * (1.0 - (*saved)[i] * (*saved)[i]);
    s.accumulate(a.id, std::move(d));
  });
}

Var sigmoid(const Var& a) {
  Tensor y = sigmoid(a.value());
  auto saved = std::make_shared<Tensor>(y);
  return tape_of(a).record(std::move(y), {a}, [a, saved](const Tensor& g, GradSink& s) {
    Tensor d(saved->shape());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = g[i] * (*saved)[i] * (1.0 - (*saved)[i]);
    s.accumulate(a.id, std::move(d));
  });
}

Var softplus(const Var& a) {
  return tape_of(a).record(softplus(a.value()), {a}, [a](const Tensor& g, GradSink& s) {
    s.accumulate(a.id, mul(g, sigmoid(a.value())));
  });
}

Var exp(const Var& a) {
  Tensor y = exp(a.value());
  auto saved = std::make_shared<Tensor>(y);
  return tape_of(a).record(std::move(y), {a},
                           [a, saved](const Tensor& g, GradSink& s) { s.accumulate(a.id, mul(g, *saved)); });
}

Var log(const Var& a) {
  return tape_of(a).record(log(a.value()), {a}, [a](const Tensor& g, GradSink& s) {
    const Tensor& x = a.value();
    Tensor d(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = g[i] / x[i];
    s.accumulate(a.id, std::move(d));
  });
}

Var sqrt(const Var& a) {
  Tensor y = sqrt(a.value());
  auto saved = std::make_shared<Tensor>(y);
  return tape_of(a).record(std::move(y), {a}, [a, saved](const Tensor& g, GradSink& s) {
    Tensor d(saved->shape());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = g[i] * 0.5 / (*saved)[i];
    s.accumulate(a.id, std::move(d));
  });
}

Var square(const Var& a) {
  return tape_of(a).record(square(a.value()), {a}, [a](const Tensor& g, GradSink& s) {
    s.accumulate(a.id, scale(mul(g, a.value()), 2.0));
  });
}

Var sum(const Var& a) {
  Shape sa = a.shape();
  return tape_of(a).record(sum(a.value()), {a}, [a, sa](const Tensor& g, GradSink& s) {
    s.accumulate(a.id, Tensor(sa, g[0]));
  });
}

Var tile_rows(const Var& row, std::size_t n) {
  Shape sr = row.shape();
  return tape_of(row).record(tile_rows(row.value(), n), {row}, [row, sr](const Tensor& g, GradSink& s) {
    const std::size_t c = g.cols();
    Tensor gr(sr);
    for (std::size_t i = 0; i < g.rows(); ++i) {
      for (std::size_t j = 0; j < c; ++j) gr[j] += g[i * c + j];
    }
    s.accumulate(row.id, std::move(gr));
  });
}

Var column_as_row(const Var& w, std::size_t j) {
  Shape sw = w.shape();
  return tape_of(w).record(column_as_row(w.value(), j), {w}, [w, sw, j](const Tensor& g, GradSink& s) {
    Tensor gw(sw);
    const std::size_t c = sw[1];
    for (std::size_t i = 0; i < sw[0]; ++i) gw[i * c + j] = g[i];
    s.accumulate(w.id, std::move(gw));
  });
}

Var concat_rows(std::span<const Var> parts) {
  std::vector<Tensor> values;
  values.reserve(parts.size());
  for (const Var& p : parts) values.push_back(p.value());
  std::vector<Var> inputs(parts.begin(), parts.end());
  Tensor out = concat_rows(values);
  return tape_of(parts[0]).record(std::move(out), inputs, [inputs](const Tensor& g, GradSink& s) {
    std::size_t row = 0;
    for (const Var& p : inputs) {
      const std::size_t r = p.value().rows();
      s.accumulate(p.id, slice_rows(g, row, row + r));
      row += r;
    }
  });
}

Var slice_rows(const Var& a, std::size_t begin, std::size_t end) {
  Shape sa = a.shape();
  return tape_of(a).record(slice_rows(a.value(), begin, end), {a},
                           [a, sa, begin](const Tensor& g, GradSink& s) {
                             Tensor ga(sa);
                             std::copy(g.ptr(), g.ptr() + g.size(), ga.ptr() + begin * ga.cols());
                             s.accumulate(a.id, std::move(ga));
                           });
}

Var gather_rows(const Var& a, std::span<const std::size_t> rows) {
  Shape sa = a.shape();
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return tape_of(a).record(gather_rows(a.value(), rows), {a},
                           [a, sa, idx = std::move(idx)](const Tensor& g, GradSink& s) {
                             s.accumulate(a.id, segment_sum(g, idx, sa[0]));
                           });
}

Var segment_sum(const Var& a, std::span<const std::size_t> segment, std::size_t n_segments) {
  std::vector<std::size_t> idx(segment.begin(), segment.end());
  return tape_of(a).record(segment_sum(a.value(), segment, n_segments), {a},
                           [a, idx = std::move(idx)](const Tensor& g, GradSink& s) {
                             s.accumulate(a.id, gather_rows(g, idx));
                           });
}

}  // namespace autostpp::numkit
