#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace autostpp::stpp {

struct Event {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Spatial domain S = [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;

  double area() const { return (x1 - x0) * (y1 - y0); }
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  // DataError unless x0 < x1 and y0 < y1, all finite.
  void validate() const;

  friend bool operator==(const Rect&, const Rect&) = default;
};

void to_json(nlohmann::json& j, const Rect& r);
void from_json(const nlohmann::json& j, Rect& r);

/// Events observed on domain x [0, T), strictly increasing in t.
struct EventSequence {
  std::vector<Event> events;
  Rect domain;
  double T = 1.0;

  std::size_t size() const { return events.size(); }
  // DataError on unordered times, times outside [0, T), events outside the
  // domain or non-finite coordinates.
  void validate() const;

  friend bool operator==(const EventSequence&, const EventSequence&) = default;
};

/// Events of `seq` strictly before t (at most `window` of the latest when
/// window > 0).
std::span<const Event> history_before(std::span<const Event> events, double t, std::size_t window);

/// Evaluation grid: k cell centres per axis, lexicographic with x outer:
/// point (i, j) has index i * k + j.
struct Grid {
  Rect domain;
  std::size_t k = 101;

  std::vector<double> xs() const;
  std::vector<double> ys() const;
  std::size_t size() const { return k * k; }
  double cell_area() const { return domain.area() / static_cast<double>(k * k); }
};

/// Multinomial distribution over the points of a grid.
struct GridDist {
  std::size_t k = 0;
  std::vector<double> p;
};

// Normalise nonnegative grid values into a GridDist (DomainError if all zero).
GridDist normalize(std::size_t k, std::vector<double> values);

}  // namespace autostpp::stpp
