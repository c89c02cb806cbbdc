#include <cmath>
#include <vector>

#include "autostpp/errors.hpp"
#include "autostpp/evaluate/metrics.hpp"
#include "autostpp/simulate/dataset.hpp"
#include "doctest.h"
#include "stpp_fixtures.hpp"
#include "support.hpp"

using namespace autostpp;
using namespace autostpp::evaluate;
using stpp::EventSequence;
using stpp::Grid;
using stpp::GridDist;
using stpp::Rect;

namespace {

GridDist random_dist(Rng& rng, std::size_t k) {
  std::vector<double> v(k * k);
  for (auto& x : v) x = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
  v[0] += 1e-3;
  return stpp::normalize(k, v);
}

stpp::AutoStppModel poisson_model(double mu, Rect S) {
  Rng rng(5, "eval-poisson");
  auto m = stpp::AutoStppModel::init(1, prodnet::ProdSum::default_factor_spec(), mu, 20, S, rng);
  m.set_influence_enabled(false);
  return m;
}

}  // namespace

TEST_CASE("hellinger unit cases") {
  const GridDist p{1, {0.5, 0.5}}, q{1, {0.9, 0.1}};
  CHECK(hellinger(p, p) == 0.0);
  CHECK(std::abs(hellinger(p, q) - 0.3249) < 1e-4);
  CHECK(hellinger(GridDist{1, {1.0, 0.0, 0.0}}, GridDist{1, {0.0, 0.4, 0.6}}) == 1.0);
  CHECK_THROWS_AS(hellinger(GridDist{2, {0.25, 0.25, 0.25, 0.25}}, p), ShapeError);
}

TEST_CASE("hellinger is a bounded metric") {
  Rng rng(8, "hellinger");
  for (int i = 0; i < 200; ++i) {
    const auto a = random_dist(rng, 5), b = random_dist(rng, 5), c = random_dist(rng, 5);
    const double ab = hellinger(a, b), ba = hellinger(b, a);
    CHECK(ab == ba);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(ab <= hellinger(a, c) + hellinger(c, b) + 1e-12);
  }
}

TEST_CASE("ground truth is at distance zero from itself") {
  for (const std::string proc : {"sthp", "stsc"}) {
    const auto p = simulate::preset(proc, "ds1");
    const auto full = simulate::simulate(p, 200.0, 4);
    const auto split = simulate::split_dataset(full, 10, 20.0);
    const Grid grid{full.domain, 41};
    const auto truth = truth_intensity(p);
    CHECK(time_avg_hellinger(truth, truth, full, split.test, grid, 10) < 1e-6);
  }
}

TEST_CASE("a background-only model is far from a peaked truth") {
  const auto p = simulate::preset("sthp", "ds3");
  const auto full = simulate::simulate(p, 200.0, 2);
  const auto split = simulate::split_dataset(full, 10, 20.0);
  const Grid grid{full.domain, 41};
  const auto flat = poisson_model(1.0, full.domain);
  const double h = time_avg_hellinger(model_intensity(flat), truth_intensity(p), full, split.test, grid, 10);
  CHECK(h > 0.2);
  CHECK(h <= 1.0);
}

TEST_CASE("time-averaged Hellinger is stable under grid refinement") {
  const auto p = simulate::preset("stsc", "ds1");
  const auto full = simulate::simulate(p, 200.0, 6);
  const auto split = simulate::split_dataset(full, 10, 20.0);
  Rng rng(12, "eval-refine");
  const auto m = testsupport::random_model(rng, full.domain);
  const auto model = model_intensity(m);
  const auto truth = truth_intensity(p);
  const double coarse = time_avg_hellinger(model, truth, full, split.test, Grid{full.domain, 51}, 10);
  const double fine = time_avg_hellinger(model, truth, full, split.test, Grid{full.domain, 101}, 10);
  CHECK(std::abs(coarse - fine) < 0.01);
}

TEST_CASE("sample times are evenly spaced inside the window") {
  const auto ts = sample_times(20.0, 4);
  CHECK(ts == std::vector<double>{2.5, 7.5, 12.5, 17.5});
}

TEST_CASE("test LL of a Poisson model matches its analytic expectation") {
  const Rect S{0.0, 2.0, 0.0, 1.5};
  const double mu = 3.0, T = 10.0, mean_n = mu * S.area() * T;
  Rng rng(21, "eval-poisson-data");
  std::vector<EventSequence> seqs;
  for (int s = 0; s < 40; ++s) {
    EventSequence seq{{}, S, T};
    for (double t = rng.exponential(mu * S.area()); t < T; t += rng.exponential(mu * S.area())) {
      seq.events.push_back({rng.uniform(S.x0, S.x1), rng.uniform(S.y0, S.y1), t});
    }
    seqs.push_back(seq);
  }
  const auto m = poisson_model(mu, S);
  const auto ll = test_ll(m, seqs);
  const double expect = -mean_n + mean_n * std::log(mu);
  const double sd = std::log(mu) * std::sqrt(mean_n) / std::sqrt(static_cast<double>(seqs.size()));
  CHECK(std::abs(ll.mean - expect) < 3.0 * sd);
  CHECK(ll.n_sequences == 40);

  // each sequence by hand
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    const double hand = -mu * S.area() * T + static_cast<double>(seqs[s].size()) * std::log(mu);
    CHECK(ll.per_sequence[s] == doctest::Approx(hand).epsilon(1e-12));
  }
  const auto again = test_ll(m, seqs);
  CHECK(again.mean == ll.mean);
  CHECK(again.stddev == ll.stddev);
}

TEST_CASE("metrics report") {
  DatasetReport a{"stsc/ds1", summarize_ll(std::vector<double>{-10.0, -12.0}, 20), 0.25};
  DatasetReport b{"sthp/ds1", summarize_ll(std::vector<double>{-14.0}, 5), std::nullopt};
  const std::vector<DatasetReport> both{a, b};
  const auto j = report_json(both);
  CHECK(j["ll_mean"].get<double>() == doctest::Approx(-12.0));
  CHECK(j["ll_std"].get<double>() == doctest::Approx(2.0));
  CHECK(j["hellinger_mean"].get<double>() == 0.25);
  CHECK(j["per_dataset"]["stsc/ds1"]["ll_per_event"].get<double>() == doctest::Approx(-1.1));
  CHECK_FALSE(j["per_dataset"]["sthp/ds1"].contains("hellinger_mean"));
  CHECK(report_json(std::vector<DatasetReport>{b})["hellinger_mean"].is_null());
}
