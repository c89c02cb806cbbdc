#include "autostpp/bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "autostpp/autoint/naive.hpp"
#include "autostpp/errors.hpp"
#include "autostpp/io.hpp"
#include "autostpp/rng.hpp"

namespace autostpp::bench {

using autoint::DerivSpec;
using autoint::MlpSpec;
using autoint::ParamSet;
using numkit::Tensor;

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

Timing time_it(const std::function<void()>& fn, std::size_t repeats) {
  fn();
  std::vector<double> ms;
  for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(ms.begin(), ms.end());
  return Timing{quantile(ms, 0.5), quantile(ms, 0.75) - quantile(ms, 0.25)};
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg, const std::function<void(const std::string&)>& sink) {
  std::vector<BenchRow> rows;
  Rng rng(cfg.seed, "bench");
  Tensor x({cfg.batch, 3});
  for (auto& v : x.data()) v = rng.uniform(-1.0, 1.0);

  for (std::size_t width : cfg.widths) {
    for (std::size_t layers : cfg.layers) {
      MlpSpec spec;
      spec.widths = {3};
      for (std::size_t l = 0; l < layers; ++l) spec.widths.push_back(width);
      spec.widths.push_back(1);
      const ParamSet params = ParamSet::init(spec, rng);
      for (int order : cfg.orders) {
        for (const std::string kind : {"mixed", "univariate"}) {
          DerivSpec dims;
          for (int k = 0; k < order; ++k) dims.dims.push_back(kind == "mixed" ? static_cast<std::size_t>(k) : 0);

          const Tensor dp = autoint::dnforward(params, x, dims);
          const Tensor naive = autoint::naive_dnforward(params, x, dims);
          for (std::size_t i = 0; i < dp.size(); ++i) {
            if (std::abs(dp[i] - naive[i]) > 1e-10 * std::max(1.0, std::abs(naive[i]))) {
              throw NumericError("dnforward and naive_dnforward disagree for " + kind + " order " +
                                 std::to_string(order) + ": " + format_double(dp[i]) + " vs " +
                                 format_double(naive[i]));
            }
          }

          auto measure = [&](const std::function<void()>& fn) {
            Timing t = time_it(fn, cfg.repeats);
            for (int retry = 0; retry < 2 && t.iqr_ms > 0.2 * t.median_ms; ++retry) t = time_it(fn, cfg.repeats);
            if (t.iqr_ms > 0.2 * t.median_ms && sink) {
              sink("noisy timing (IQR " + format_double(t.iqr_ms) + " ms, median " + format_double(t.median_ms) +
                   " ms) for layers " + std::to_string(layers) + " order " + std::to_string(order) + " " + kind);
            }
            return t;
          };
          const Timing t_dp = measure([&] { (void)autoint::dnforward(params, x, dims); });
          const Timing t_naive = measure([&] { (void)autoint::naive_dnforward(params, x, dims); });
          rows.push_back({layers, width, order, kind, "dp", t_dp.median_ms, t_dp.iqr_ms,
                          t_naive.median_ms / t_dp.median_ms});
          rows.push_back({layers, width, order, kind, "naive", t_naive.median_ms, t_naive.iqr_ms, 1.0});
        }
      }
    }
  }
  return rows;
}

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "layers,width,order,kind,impl,median_ms,speedup\n";
  for (const auto& r : rows) {
    out << r.layers << ',' << r.width << ',' << r.order << ',' << r.kind << ',' << r.impl << ','
        << format_double(r.median_ms) << ',' << format_double(r.speedup) << '\n';
  }
}

}  // namespace autostpp::bench
