#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace autostpp::bench {

struct BenchConfig {
  std::vector<std::size_t> layers{2, 3, 4};  // hidden layers
  std::vector<int> orders{1, 2, 3};
  std::vector<std::size_t> widths{32};
  std::size_t repeats = 11;
  std::size_t batch = 256;
  std::uint64_t seed = 0;
};

struct BenchRow {
  std::size_t layers = 0;
  std::size_t width = 0;
  int order = 0;
  std::string kind;  // "mixed" (d/dx0 dx1 ...) or "univariate" (d/dx0 dx0 ...)
  std::string impl;  // "dp" or "naive"
  double median_ms = 0.0;
  double iqr_ms = 0.0;
  double speedup = 1.0;  // naive median / this median
};

/// Median-of-repeats wall time of one callable, after one warm-up call.
struct Timing {
  double median_ms = 0.0;
  double iqr_ms = 0.0;
};
Timing time_it(const std::function<void()>& fn, std::size_t repeats);

/// Times dnforward against naive_dnforward on tanh MLPs with 3 inputs. Each
/// configuration is first checked for agreement within 1e-10 (NumericError
/// otherwise). Measurements whose IQR exceeds 20% of the median are retried
/// up to twice.
std::vector<BenchRow> run_bench(const BenchConfig& cfg,
                                const std::function<void(const std::string&)>& sink = {});

/// layers,width,order,kind,impl,median_ms,speedup
void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows);

}  // namespace autostpp::bench
