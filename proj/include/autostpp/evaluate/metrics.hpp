#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "autostpp/simulate/dataset.hpp"
#include "autostpp/simulate/process.hpp"
#include "autostpp/stpp/model.hpp"
#include "json.hpp"

namespace autostpp::evaluate {

/// (1 / sqrt 2) || sqrt(P) - sqrt(Q) ||_2, in [0, 1]. ShapeError when the
/// grids differ.
double hellinger(const stpp::GridDist& p, const stpp::GridDist& q);

/// A time at which spatial densities are compared. The model sees the window
/// (rebased time and history); the ground truth sees the original sequence.
struct EvalPoint {
  double t_local = 0.0;
  double t_abs = 0.0;
  std::span<const stpp::Event> window_events;
  std::span<const stpp::Event> full_events;
};

/// Unnormalised intensity on the points of a grid.
using GridIntensity = std::function<std::vector<double>(const EvalPoint&, const stpp::Grid&)>;

GridIntensity model_intensity(const stpp::AutoStppModel& m);
GridIntensity truth_intensity(const simulate::ProcessParams& p);

/// `n_times` evenly spaced times (k + 1/2) length / n_times in a window.
std::vector<double> sample_times(double length, std::size_t n_times);

/// Mean Hellinger distance between the normalised model and truth
/// intensities over n_times times in each test window.
double time_avg_hellinger(const GridIntensity& model, const GridIntensity& truth,
                          const stpp::EventSequence& full, std::span<const simulate::Window> test,
                          const stpp::Grid& grid, std::size_t n_times = 50);

struct LlSummary {
  double mean = 0.0;       // per sequence
  double stddev = 0.0;     // across sequences
  double per_event = 0.0;  // total LL / total events
  std::size_t n_sequences = 0;
  std::size_t n_events = 0;
  std::vector<double> per_sequence;
};

LlSummary test_ll(const stpp::AutoStppModel& m, std::span<const stpp::EventSequence> seqs);
LlSummary summarize_ll(std::span<const double> per_sequence, std::size_t n_events);

/// Mean and sample standard deviation (0 for fewer than two values).
std::pair<double, double> mean_std(std::span<const double> xs);

struct DatasetReport {
  std::string name;
  LlSummary ll;
  std::optional<double> hellinger;
};

/// {"ll_mean", "ll_std", "hellinger_mean", "per_dataset": {name: {...}}};
/// the top-level LL statistics pool the sequences of every dataset.
nlohmann::json report_json(std::span<const DatasetReport> datasets);

}  // namespace autostpp::evaluate
