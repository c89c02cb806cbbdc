#include "autostpp/evaluate/metrics.hpp"

#include <cmath>

#include "autostpp/errors.hpp"

namespace autostpp::evaluate {

using stpp::EventSequence;
using stpp::Grid;
using stpp::GridDist;

double hellinger(const GridDist& p, const GridDist& q) {
  if (p.k != q.k || p.p.size() != q.p.size()) {
    throw ShapeError("Hellinger distance between grids of " + std::to_string(p.p.size()) + " and " +
                     std::to_string(q.p.size()) + " points");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.p.size(); ++i) {
    const double d = std::sqrt(p.p[i]) - std::sqrt(q.p[i]);
    s += d * d;
  }
  return std::min(std::sqrt(0.5 * s), 1.0);
}

GridIntensity model_intensity(const stpp::AutoStppModel& m) {
  return [&m](const EvalPoint& at, const Grid& grid) {
    return stpp::intensity_grid(m, at.t_local, at.window_events, grid);
  };
}

GridIntensity truth_intensity(const simulate::ProcessParams& p) {
  return [p](const EvalPoint& at, const Grid& grid) {
    return simulate::truth_intensity_grid(p, at.t_abs, at.full_events, grid);
  };
}

std::vector<double> sample_times(double length, std::size_t n_times) {
  std::vector<double> ts(n_times);
  for (std::size_t k = 0; k < n_times; ++k) {
    ts[k] = (static_cast<double>(k) + 0.5) * length / static_cast<double>(n_times);
  }
  return ts;
}

double time_avg_hellinger(const GridIntensity& model, const GridIntensity& truth, const EventSequence& full,
                          std::span<const simulate::Window> test, const Grid& grid, std::size_t n_times) {
  if (test.empty() || n_times == 0) throw DomainError("time-averaged Hellinger needs test windows and times");
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& w : test) {
    for (double t : sample_times(w.seq.T, n_times)) {
      EvalPoint at{t, w.offset + t, w.seq.events, full.events};
      const auto p = stpp::normalize(grid.k, model(at, grid));
      const auto q = stpp::normalize(grid.k, truth(at, grid));
      total += hellinger(p, q);
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

std::pair<double, double> mean_std(std::span<const double> xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(xs.size() - 1))};
}

LlSummary summarize_ll(std::span<const double> per_sequence, std::size_t n_events) {
  LlSummary s;
  std::tie(s.mean, s.stddev) = mean_std(per_sequence);
  s.per_sequence.assign(per_sequence.begin(), per_sequence.end());
  s.n_sequences = per_sequence.size();
  s.n_events = n_events;
  double total = 0.0;
  for (double v : per_sequence) total += v;
  s.per_event = n_events > 0 ? total / static_cast<double>(n_events) : 0.0;
  return s;
}

LlSummary test_ll(const stpp::AutoStppModel& m, std::span<const EventSequence> seqs) {
  std::vector<double> lls;
  std::size_t events = 0;
  for (const auto& s : seqs) {
    lls.push_back(stpp::log_likelihood(m, s));
    events += s.size();
  }
  return summarize_ll(lls, events);
}

nlohmann::json report_json(std::span<const DatasetReport> datasets) {
  nlohmann::json per = nlohmann::json::object();
  std::vector<double> pooled, hell;
  for (const auto& d : datasets) {
    nlohmann::json j{{"ll_mean", d.ll.mean},
                     {"ll_std", d.ll.stddev},
                     {"ll_per_event", d.ll.per_event},
                     {"n_sequences", d.ll.n_sequences},
                     {"n_events", d.ll.n_events}};
    if (d.hellinger) {
      j["hellinger_mean"] = *d.hellinger;
      hell.push_back(*d.hellinger);
    }
    per[d.name] = j;
    pooled.insert(pooled.end(), d.ll.per_sequence.begin(), d.ll.per_sequence.end());
  }
  const auto [ll_mean, ll_std] = mean_std(pooled);
  nlohmann::json out{{"ll_mean", ll_mean}, {"ll_std", ll_std}, {"per_dataset", per}};
  out["hellinger_mean"] = hell.empty() ? nlohmann::json(nullptr) : nlohmann::json(mean_std(hell).first);
  return out;
}

}  // namespace autostpp::evaluate
