#include "autostpp/simulate/process.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "autostpp/errors.hpp"

namespace autostpp::simulate {

using stpp::Event;
using stpp::EventSequence;
using stpp::Grid;
using stpp::Rect;

namespace {

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive, got " + std::to_string(v));
  }
}

// Gaussian density with diagonal covariance `var`, centred at (cx, cy).
double gauss2(double x, double y, double cx, double cy, const std::array<double, 2>& var) {
  const double dx = x - cx, dy = y - cy;
  return std::exp(-0.5 * (dx * dx / var[0] + dy * dy / var[1])) /
         (2.0 * std::numbers::pi * std::sqrt(var[0] * var[1]));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Mass of the Gaussian centred at (cx, cy) inside the unit square.
double unit_square_mass(double cx, double cy, const std::array<double, 2>& var) {
  const double sx = std::sqrt(var[0]), sy = std::sqrt(var[1]);
  return (normal_cdf((1.0 - cx) / sx) - normal_cdf(-cx / sx)) *
         (normal_cdf((1.0 - cy) / sy) - normal_cdf(-cy / sy));
}

double g0_normalized(const StscParams& p, double x, double y) {
  return gauss2(x, y, 0.0, 0.0, p.sigma_g0) / unit_square_mass(0.0, 0.0, p.sigma_g0);
}

nlohmann::json diag_json(const std::array<double, 2>& v) { return nlohmann::json::array({v[0], v[1]}); }

std::array<double, 2> diag_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw DataError("covariance must be a 2-element diagonal");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

void SthpParams::validate() const {
  check_positive(alpha, "alpha");
  check_positive(beta, "beta");
  check_positive(mu, "mu");
  for (double v : sigma_g0) check_positive(v, "Sigma_g0 diagonal");
  for (double v : sigma_g2) check_positive(v, "Sigma_g2 diagonal");
  if (alpha / beta >= 1.0) {
    throw DomainError("supercritical Hawkes parameters: branching ratio alpha/beta = " +
                      std::to_string(alpha / beta) + " >= 1");
  }
}

void StscParams::validate() const {
  check_positive(alpha, "alpha");
  check_positive(beta, "beta");
  check_positive(mu, "mu");
  for (double v : sigma_g0) check_positive(v, "Sigma_g0 diagonal");
  for (double v : sigma_g2) check_positive(v, "Sigma_g2 diagonal");
  if (grid < 2) throw DomainError("STSC grid needs at least 2 cells per axis");
}

std::string process_name(const ProcessParams& p) {
  return std::holds_alternative<SthpParams>(p) ? "sthp" : "stsc";
}

ProcessParams preset(const std::string& process, const std::string& dataset) {
  if (process == "sthp") {
    if (dataset == "ds1") return SthpParams{0.5, 1.0, 0.2, {0.2, 0.2}, {0.5, 0.5}};
    if (dataset == "ds2") return SthpParams{0.5, 0.6, 0.15, {5.0, 5.0}, {0.1, 0.1}};
    if (dataset == "ds3") return SthpParams{0.3, 2.0, 1.0, {1.0, 1.0}, {0.1, 0.1}};
  } else if (process == "stsc") {
    if (dataset == "ds1") return StscParams{0.2, 0.2, 1.0, {1.0, 1.0}, {0.85, 0.85}, 101};
    if (dataset == "ds2") return StscParams{0.3, 0.2, 1.0, {0.4, 0.4}, {0.3, 0.3}, 101};
    if (dataset == "ds3") return StscParams{0.4, 0.2, 1.0, {0.25, 0.25}, {0.2, 0.2}, 101};
  } else {
    throw DataError("unknown process '" + process + "' (expected sthp or stsc)");
  }
  throw DataError("unknown dataset '" + dataset + "' (expected ds1, ds2 or ds3)");
}

double reference_event_count(const std::string& process, const std::string& dataset) {
  static const std::map<std::string, double> counts{
      {"sthp/ds1", 3983},  {"sthp/ds2", 9017}, {"sthp/ds3", 11693},
      {"stsc/ds1", 10002}, {"stsc/ds2", 6668}, {"stsc/ds3", 5004}};
  auto it = counts.find(process + "/" + dataset);
  if (it == counts.end()) throw DataError("no reference count for " + process + "/" + dataset);
  return it->second;
}

void to_json(nlohmann::json& j, const ProcessParams& p) {
  std::visit(
      [&](const auto& q) {
        j = nlohmann::json{{"process", process_name(p)},
                           {"alpha", q.alpha},
                           {"beta", q.beta},
                           {"mu", q.mu},
                           {"sigma_g0", diag_json(q.sigma_g0)},
                           {"sigma_g2", diag_json(q.sigma_g2)}};
      },
      p);
  if (const auto* s = std::get_if<StscParams>(&p)) j["grid"] = s->grid;
}

void from_json(const nlohmann::json& j, ProcessParams& p) {
  const std::string process = j.at("process").get<std::string>();
  auto fill = [&](auto& q) {
    q.alpha = j.at("alpha").get<double>();
    q.beta = j.at("beta").get<double>();
    q.mu = j.at("mu").get<double>();
    q.sigma_g0 = diag_from(j.at("sigma_g0"));
    q.sigma_g2 = diag_from(j.at("sigma_g2"));
  };
  try {
    if (process == "sthp") {
      SthpParams q;
      fill(q);
      q.validate();
      p = q;
    } else if (process == "stsc") {
      StscParams q;
      fill(q);
      q.grid = j.value("grid", std::size_t{101});
      q.validate();
      p = q;
    } else {
      throw DataError("unknown process '" + process + "'");
    }
  } catch (const DomainError& e) {
    throw DataError(std::string("invalid process parameters: ") + e.what());
  }
}

Rect stsc_domain() { return Rect{0.0, 1.0, 0.0, 1.0}; }

void SthpState::advance(double t) {
  excite_ *= std::exp(-p_.beta * (t - t_));
  t_ = t;
}

StscState::StscState(const StscParams& p) : p_(p), grid_{stsc_domain(), p.grid} {
  p_.validate();
  const auto xs = grid_.xs(), ys = grid_.ys();
  g0_.resize(grid_.size());
  damp_.assign(grid_.size(), 0.0);
  for (std::size_t i = 0; i < p_.grid; ++i) {
    for (std::size_t j = 0; j < p_.grid; ++j) g0_[i * p_.grid + j] = g0_normalized(p_, xs[i], ys[j]);
  }
  max_growth_ = p_.beta * *std::max_element(g0_.begin(), g0_.end());
}

double StscState::cell_intensity(std::size_t cell, double t) const {
  return p_.mu * std::exp(p_.beta * g0_[cell] * t - damp_[cell]);
}

double StscState::total_intensity(double t) const {
  double total = 0.0;
  for (std::size_t c = 0; c < g0_.size(); ++c) total += cell_intensity(c, t);
  return total * grid_.cell_area();
}

void StscState::cell_masses(double t, std::vector<double>& out) const {
  out.resize(g0_.size());
  const double area = grid_.cell_area();
  for (std::size_t c = 0; c < g0_.size(); ++c) out[c] = cell_intensity(c, t) * area;
}

void StscState::add_event(double x, double y) {
  const auto xs = grid_.xs(), ys = grid_.ys();
  const double norm = unit_square_mass(x, y, p_.sigma_g2);
  for (std::size_t i = 0; i < p_.grid; ++i) {
    for (std::size_t j = 0; j < p_.grid; ++j) {
      damp_[i * p_.grid + j] += p_.alpha * (gauss2(xs[i], ys[j], x, y, p_.sigma_g2) / norm);
    }
  }
}

EventSequence simulate_sthp(const SthpParams& p, double T, Rng& rng) {
  p.validate();
  check_positive(T, "horizon T");
  SthpState state(p);
  std::vector<Event> events;
  const double sg0[2] = {std::sqrt(p.sigma_g0[0]), std::sqrt(p.sigma_g0[1])};
  const double sg2[2] = {std::sqrt(p.sigma_g2[0]), std::sqrt(p.sigma_g2[1])};
  while (true) {
    const double bound = state.total_intensity();
    const double t = state.time() + rng.exponential(bound);
    if (t >= T) break;
    state.advance(t);
    const double lambda = state.total_intensity();
    if (rng.uniform() * bound > lambda) continue;

    // Background with probability mu / lambda, otherwise a parent chosen in
    // proportion to its current excitation, newest first.
    double u = rng.uniform() * lambda;
    Event e{0.0, 0.0, t};
    if (u < p.mu || events.empty()) {
      e.x = sg0[0] * rng.normal();
      e.y = sg0[1] * rng.normal();
    } else {
      u -= p.mu;
      std::size_t parent = 0;
      for (std::size_t i = events.size(); i-- > 0;) {
        const double w = p.alpha * std::exp(-p.beta * (t - events[i].t));
        parent = i;
        if (u < w) break;
        u -= w;
      }
      e.x = events[parent].x + sg2[0] * rng.normal();
      e.y = events[parent].y + sg2[1] * rng.normal();
    }
    events.push_back(e);
    state.add_event();
  }

  Rect domain{-1.0, 1.0, -1.0, 1.0};
  if (!events.empty()) {
    auto [xlo, xhi] = std::minmax_element(events.begin(), events.end(),
                                          [](const Event& a, const Event& b) { return a.x < b.x; });
    auto [ylo, yhi] = std::minmax_element(events.begin(), events.end(),
                                          [](const Event& a, const Event& b) { return a.y < b.y; });
    const double mx = std::max(0.05 * (xhi->x - xlo->x), 1e-3);
    const double my = std::max(0.05 * (yhi->y - ylo->y), 1e-3);
    domain = Rect{xlo->x - mx, xhi->x + mx, ylo->y - my, yhi->y + my};
  }
  return EventSequence{std::move(events), domain, T};
}

EventSequence simulate_stsc(const StscParams& p, double T, Rng& rng) {
  p.validate();
  check_positive(T, "horizon T");
  StscState state(p);
  const std::size_t k = p.grid;
  const double hx = 1.0 / static_cast<double>(k);
  std::vector<Event> events;
  std::vector<double> mass;
  double t = 0.0;
  // Between events every cell grows at most like exp(max_growth dt), so over a
  // look-ahead of h the total is bounded by lambda(t) exp(max_growth h).
  const double h_max = 1.0 / state.max_growth();
  while (t < T) {
    const double now = state.total_intensity(t);
    const double lookahead = std::min(2.0 / now, h_max);
    const double bound = now * std::exp(state.max_growth() * lookahead);
    const double tau = rng.exponential(bound);
    if (tau > lookahead) {
      t += lookahead;
      continue;
    }
    t += tau;
    if (t >= T) break;
    if (rng.uniform() * bound > state.total_intensity(t)) continue;

    state.cell_masses(t, mass);
    double total = 0.0;
    for (double m : mass) total += m;
    double u = rng.uniform() * total;
    std::size_t cell = mass.size() - 1;
    for (std::size_t c = 0; c < mass.size(); ++c) {
      if (u < mass[c]) {
        cell = c;
        break;
      }
      u -= mass[c];
    }
    const std::size_t i = cell / k, j = cell % k;
    Event e{(static_cast<double>(i) + rng.uniform()) * hx, (static_cast<double>(j) + rng.uniform()) * hx, t};
    events.push_back(e);
    state.add_event(e.x, e.y);
  }
  return EventSequence{std::move(events), stsc_domain(), T};
}

EventSequence simulate(const ProcessParams& p, double T, std::uint64_t seed) {
  Rng rng(seed, "sim");
  return std::visit(
      [&](const auto& q) {
        if constexpr (std::is_same_v<std::decay_t<decltype(q)>, SthpParams>) {
          return simulate_sthp(q, T, rng);
        } else {
          return simulate_stsc(q, T, rng);
        }
      },
      p);
}

double truth_intensity(const ProcessParams& p, double x, double y, double t,
                       std::span<const Event> events) {
  const auto hist = stpp::history_before(events, t, 0);
  if (const auto* h = std::get_if<SthpParams>(&p)) {
    double lambda = h->mu * gauss2(x, y, 0.0, 0.0, h->sigma_g0);
    for (const auto& e : hist) {
      lambda += h->alpha * std::exp(-h->beta * (t - e.t)) * gauss2(x, y, e.x, e.y, h->sigma_g2);
    }
    return lambda;
  }
  const auto& s = std::get<StscParams>(p);
  double damp = 0.0;
  for (const auto& e : hist) {
    damp += s.alpha * (gauss2(x, y, e.x, e.y, s.sigma_g2) / unit_square_mass(e.x, e.y, s.sigma_g2));
  }
  return s.mu * std::exp(s.beta * g0_normalized(s, x, y) * t - damp);
}

double truth_total_intensity(const ProcessParams& p, double t, std::span<const Event> events) {
  const auto hist = stpp::history_before(events, t, 0);
  if (const auto* h = std::get_if<SthpParams>(&p)) {
    double excite = 0.0;
    for (const auto& e : hist) excite += h->alpha * std::exp(-h->beta * (t - e.t));
    return h->mu + excite;
  }
  const auto& s = std::get<StscParams>(p);
  const Grid grid{stsc_domain(), s.grid};
  double total = 0.0;
  for (double v : truth_intensity_grid(p, t, events, grid)) total += v;
  return total * grid.cell_area();
}

std::vector<double> truth_intensity_grid(const ProcessParams& p, double t,
                                         std::span<const Event> events, const Grid& grid) {
  const auto xs = grid.xs(), ys = grid.ys();
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.k; ++i) {
    for (std::size_t j = 0; j < grid.k; ++j) out[i * grid.k + j] = truth_intensity(p, xs[i], ys[j], t, events);
  }
  return out;
}

}  // namespace autostpp::simulate
