#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "autostpp/rng.hpp"
#include "autostpp/stpp/events.hpp"
#include "json.hpp"

namespace autostpp::simulate {

/// Spatiotemporal Hawkes process on R^2:
///   lambda(s, t) = mu g0(s) + sum_{t_i < t} alpha exp(-beta (t - t_i)) g2(s, s_i)
/// with Gaussian g0 (centred at the origin) and g2 (centred at s_i). Each
/// event has alpha / beta expected offspring.
struct SthpParams {
  double alpha = 0.5;
  double beta = 1.0;
  double mu = 0.2;
  std::array<double, 2> sigma_g0{0.2, 0.2};  // diagonal covariance
  std::array<double, 2> sigma_g2{0.5, 0.5};

  // DomainError on non-positive values or alpha / beta >= 1.
  void validate() const;
  friend bool operator==(const SthpParams&, const SthpParams&) = default;
};

/// Spatiotemporal self-correcting process on S = [0, 1]^2:
///   lambda(s, t) = mu exp(beta g0(s) t - sum_{t_i < t} alpha g2(s, s_i))
/// with g0, g2 Gaussian densities renormalised to integrate to 1 over S.
/// Simulated on a grid x grid discretisation of S.
struct StscParams {
  double alpha = 0.2;
  double beta = 0.2;
  double mu = 1.0;
  std::array<double, 2> sigma_g0{1.0, 1.0};
  std::array<double, 2> sigma_g2{0.85, 0.85};
  std::size_t grid = 101;

  void validate() const;
  friend bool operator==(const StscParams&, const StscParams&) = default;
};

using ProcessParams = std::variant<SthpParams, StscParams>;

std::string process_name(const ProcessParams& p);  // "sthp" | "stsc"

/// Presets ds1..ds3 for "sthp" and "stsc" (DataError otherwise).
ProcessParams preset(const std::string& process, const std::string& dataset);
/// Event counts over T = 10000 reported for the presets.
double reference_event_count(const std::string& process, const std::string& dataset);

void to_json(nlohmann::json& j, const ProcessParams& p);
void from_json(const nlohmann::json& j, ProcessParams& p);

/// The STSC spatial domain.
stpp::Rect stsc_domain();

/// Ogata thinning. STHP: the temporal intensity mu + sum alpha e^{-beta dt}
/// is nonincreasing between events, so its current value bounds it until the
/// next candidate; locations come from the background/offspring mixture.
/// The returned domain is the bounding box of the events widened by 5% of
/// its extent per side (the process lives on R^2).
stpp::EventSequence simulate_sthp(const SthpParams& p, double T, Rng& rng);

/// Ogata thinning on the grid. The total intensity grows between events, so
/// each candidate uses the bound Lambda(t + h) over a look-ahead h ~ 2 /
/// Lambda(t). Accepted events pick a cell in proportion to its intensity and
/// a uniform position inside it.
stpp::EventSequence simulate_stsc(const StscParams& p, double T, Rng& rng);

/// Simulate with the "sim" stream derived from `seed`.
stpp::EventSequence simulate(const ProcessParams& p, double T, std::uint64_t seed);

/// Ground-truth intensity from the full history (events before t are used).
double truth_intensity(const ProcessParams& p, double x, double y, double t,
                       std::span<const stpp::Event> events);
/// Integral of the ground-truth intensity over the spatial domain (for STSC,
/// of its grid discretisation): the rate the thinning step works with.
double truth_total_intensity(const ProcessParams& p, double t, std::span<const stpp::Event> events);
/// Ground truth on the points of a grid, indexed as stpp::Grid documents.
std::vector<double> truth_intensity_grid(const ProcessParams& p, double t,
                                         std::span<const stpp::Event> events,
                                         const stpp::Grid& grid);

/// Incremental temporal intensity of the STHP simulation.
class SthpState {
 public:
  explicit SthpState(const SthpParams& p) : p_(p) {}

  double time() const { return t_; }
  double total_intensity() const { return p_.mu + excite_; }
  // Move forward to t >= time().
  void advance(double t);
  // Register an event at the current time.
  void add_event() { excite_ += p_.alpha; }

 private:
  SthpParams p_;
  double t_ = 0.0;
  double excite_ = 0.0;  // sum alpha exp(-beta (t - t_i))
};

/// Incremental state of the STSC simulation, exposed so the ground-truth
/// evaluator can be checked against the intensity the thinning step used.
class StscState {
 public:
  explicit StscState(const StscParams& p);

  const StscParams& params() const { return p_; }
  const stpp::Grid& grid() const { return grid_; }
  // lambda at cell (i, j) centre, index i * k + j.
  double cell_intensity(std::size_t cell, double t) const;
  // Integral of the discretised intensity over S.
  double total_intensity(double t) const;
  // Cell intensities times cell area.
  void cell_masses(double t, std::vector<double>& out) const;
  void add_event(double x, double y);
  // Bound on d log(lambda) / dt at any cell between events.
  double max_growth() const { return max_growth_; }

 private:
  StscParams p_;
  stpp::Grid grid_;
  std::vector<double> g0_;    // normalised g0 at cell centres
  std::vector<double> damp_;  // sum alpha g2(c, s_i)
  double max_growth_ = 0.0;
};

}  // namespace autostpp::simulate
