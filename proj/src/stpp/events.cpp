#include "autostpp/stpp/events.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "autostpp/errors.hpp"

namespace autostpp::stpp {

void Rect::validate() const {
  if (!(std::isfinite(x0) && std::isfinite(x1) && std::isfinite(y0) && std::isfinite(y1)) ||
      !(x0 < x1) || !(y0 < y1)) {
    throw DataError("invalid spatial domain [" + std::to_string(x0) + ", " + std::to_string(x1) +
                    "] x [" + std::to_string(y0) + ", " + std::to_string(y1) + "]");
  }
}

void to_json(nlohmann::json& j, const Rect& r) {
  j = nlohmann::json{{"x0", r.x0}, {"x1", r.x1}, {"y0", r.y0}, {"y1", r.y1}};
}

void from_json(const nlohmann::json& j, Rect& r) {
  r.x0 = j.at("x0").get<double>();
  r.x1 = j.at("x1").get<double>();
  r.y0 = j.at("y0").get<double>();
  r.y1 = j.at("y1").get<double>();
  r.validate();
}

void EventSequence::validate() const {
  domain.validate();
  if (!(std::isfinite(T) && T > 0.0)) throw DataError("horizon T must be positive");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (!(std::isfinite(e.x) && std::isfinite(e.y) && std::isfinite(e.t))) {
      throw DataError("event " + std::to_string(i) + " has a non-finite coordinate");
    }
    if (e.t < 0.0 || e.t >= T) {
      throw DataError("event " + std::to_string(i) + " at t=" + std::to_string(e.t) +
                      " lies outside [0, " + std::to_string(T) + ")");
    }
    if (i > 0 && !(events[i - 1].t < e.t)) {
      throw DataError("event times must be strictly increasing (event " + std::to_string(i) + ")");
    }
    if (!domain.contains(e.x, e.y)) {
      throw DataError("event " + std::to_string(i) + " at (" + std::to_string(e.x) + ", " +
                      std::to_string(e.y) + ") lies outside the domain");
    }
  }
}

std::span<const Event> history_before(std::span<const Event> events, double t, std::size_t window) {
  auto end = std::lower_bound(events.begin(), events.end(), t,
                              [](const Event& e, double v) { return e.t < v; });
  std::size_t n = static_cast<std::size_t>(end - events.begin());
  std::size_t begin = (window > 0 && n > window) ? n - window : 0;
  return events.subspan(begin, n - begin);
}

std::vector<double> Grid::xs() const {
  std::vector<double> out(k);
  const double h = (domain.x1 - domain.x0) / static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = domain.x0 + (static_cast<double>(i) + 0.5) * h;
  return out;
}

std::vector<double> Grid::ys() const {
  std::vector<double> out(k);
  const double h = (domain.y1 - domain.y0) / static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = domain.y0 + (static_cast<double>(i) + 0.5) * h;
  return out;
}

GridDist normalize(std::size_t k, std::vector<double> values) {
  if (values.size() != k * k) throw ShapeError("grid values do not match a k x k grid");
  double total = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("grid values must be finite and >= 0");
    total += v;
  }
  if (!(total > 0.0)) throw DomainError("grid values sum to zero");
  for (double& v : values) v /= total;
  return GridDist{k, std::move(values)};
}

}  // namespace autostpp::stpp
