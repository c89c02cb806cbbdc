#include <cmath>
#include <numbers>
#include <vector>

#include "autostpp/baselines/mc.hpp"
#include "autostpp/errors.hpp"
#include "autostpp/simulate/dataset.hpp"
#include "autostpp/simulate/process.hpp"
#include "doctest.h"
#include "quadrature.hpp"
#include "stpp_fixtures.hpp"
#include "support.hpp"

using namespace autostpp;
using namespace autostpp::baselines;
using numkit::Tensor;
using prodnet::Cuboid;
using stpp::EventSequence;
using stpp::Rect;
using testsupport::rel_err;

namespace {

const Cuboid kUnit{{0, 0, 0}, {1, 1, 1}};

// Normalised isotropic Gaussian at the cube centre and its exact mass in the cube.
Integrand bump(double s) {
  const double norm = std::pow(2.0 * std::numbers::pi * s * s, -1.5);
  return [=](double x, double y, double z) {
    const double r2 = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5) + (z - 0.5) * (z - 0.5);
    return norm * std::exp(-0.5 * r2 / (s * s));
  };
}
double bump_mass(double s) { return std::pow(std::erf(0.5 / (s * std::numbers::sqrt2)), 3); }

double rms_relative_error(const Integrand& f, double truth, std::size_t n, int reps) {
  double sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    McConfig cfg{n, static_cast<std::uint64_t>(r), false};
    const double e = (mc_integrate(f, kUnit, cfg).estimate - truth) / truth;
    sq += e * e;
  }
  return std::sqrt(sq / reps);
}

}  // namespace

TEST_CASE("mc_integrate of a constant is exact") {
  for (bool strat : {false, true}) {
    const auto est = mc_integrate([](double, double, double) { return 1.0; }, kUnit, McConfig{1000, 3, strat});
    CHECK(est.estimate == 1.0);
    CHECK(est.std_error == 0.0);
  }
  const Cuboid box{{-1, 0, 2}, {1, 3, 2.5}};
  CHECK(mc_integrate([](double, double, double) { return 2.0; }, box, McConfig{10}).estimate ==
        doctest::Approx(6.0).epsilon(1e-15));
  CHECK_THROWS_AS(mc_integrate([](double, double, double) { return 1.0; }, kUnit, McConfig{0}), DomainError);
  CHECK_THROWS_AS(mc_integrate([](double, double, double) { return 1.0; }, Cuboid{{0, 0, 0}, {1, 0, 1}}, McConfig{}),
                  DomainError);
}

TEST_CASE("mc_integrate of xyz over the unit cube") {
  const Integrand f = [](double x, double y, double z) { return x * y * z; };
  const auto plain = mc_integrate(f, kUnit, McConfig{100000, 1, false});
  CHECK(std::abs(plain.estimate - 0.125) < 3.0 * plain.std_error);
  CHECK(plain.std_error > 0.0);
  const auto strat = mc_integrate(f, kUnit, McConfig{100000, 1, true});
  CHECK(std::abs(strat.estimate - 0.125) < 3.0 * strat.std_error + 1e-12);
  CHECK(strat.std_error < 0.1 * plain.std_error);
  CHECK(mc_integrate(f, kUnit, McConfig{5000, 9}).estimate == mc_integrate(f, kUnit, McConfig{5000, 9}).estimate);
  CHECK(mc_integrate(f, kUnit, McConfig{5000, 9}).estimate != mc_integrate(f, kUnit, McConfig{5000, 10}).estimate);
}

TEST_CASE("mc_integrate fails on sharply localised integrands") {
  const double smooth = rms_relative_error(bump(0.3), bump_mass(0.3), 1000, 50);
  const double sharp = rms_relative_error(bump(0.01), bump_mass(0.01), 1000, 50);
  CHECK(sharp >= 10.0 * smooth);
}

TEST_CASE("mc_integrate is unbiased") {
  const Cuboid box{{0.0, -1.0, 0.5}, {2.0, 1.0, 1.5}};
  const Integrand f = [](double x, double y, double z) { return std::exp(-x) * (1.0 + std::sin(3.0 * y)) + z * z; };
  const double truth = testsupport::gauss_legendre_3d(
      [&](const std::array<Tensor, 3>& p) {
        Tensor out(p[0].shape());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(p[0][i], p[1][i], p[2][i]);
        return out;
      },
      box.lo, box.hi, 2);
  double mean = 0.0, var = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto e = mc_integrate(f, box, McConfig{500, s});
    mean += e.estimate / 100.0;
    var += e.std_error * e.std_error / (100.0 * 100.0);
  }
  CHECK(std::abs(mean - truth) < 3.0 * std::sqrt(var));
}

TEST_CASE("Monte Carlo likelihood converges to the closed form") {
  Rng rng(14, "mc-converge");
  const Rect S{0.0, 1.0, 0.0, 1.0};
  const auto m = testsupport::random_model(rng, S, 20, 2);
  const auto seq = testsupport::random_sequence(rng, S, 2.0, 2);
  const Integrand f = [&](double x, double y, double t) { return m.prodsum().influence(x, y, t); };
  Rng mc_rng(1, "mc");
  const double est = mc_log_likelihood(f, m.mu(), m.window(), seq, McConfig{20000, 0, true}, mc_rng);
  CHECK(std::abs(est - stpp::log_likelihood(m, seq)) < 1e-2);
}

TEST_CASE("zero influence gives the Poisson likelihood exactly") {
  Rng rng(15, "mc-poisson");
  const Rect S{-1.0, 2.0, 0.0, 1.0};
  const auto seq = testsupport::random_sequence(rng, S, 5.0, 7);
  const double mu = 0.8;
  const double closed = -mu * S.area() * seq.T + 7.0 * std::log(mu);
  Rng mc_rng(1, "mc");
  CHECK(mc_log_likelihood([](double, double, double) { return 0.0; }, mu, 20, seq, McConfig{50}, mc_rng) ==
        doctest::Approx(closed).epsilon(1e-14));
  auto model = McStppModel::init(mu, 20, S, rng);
  model.set_influence_enabled(false);
  CHECK(model.log_likelihood(seq, 10, mc_rng) == doctest::Approx(closed).epsilon(1e-14));
  CHECK(model.intensity(0.1, 0.2, 4.0, seq.events) == doctest::Approx(mu));
  CHECK(model.tensors().size() == 1);
}

TEST_CASE("Monte Carlo STPP model: intensities and batched likelihood") {
  Rng rng(16, "mc-model");
  const Rect S{0.0, 1.0, 0.0, 1.0};
  const auto m = McStppModel::init(0.7, 3, S, rng);
  const auto seq = testsupport::random_sequence(rng, S, 3.0, 6);
  CHECK(m.influence(0.1, -0.2, 0.5) > 0.0);

  const double t = 2.9;
  double by_hand = m.mu();
  for (const auto& e : stpp::history_before(seq.events, t, 3)) by_hand += m.influence(0.3 - e.x, 0.6 - e.y, t - e.t);
  CHECK(m.intensity(0.3, 0.6, t, seq.events) == doctest::Approx(by_hand).epsilon(1e-13));
  const stpp::Grid grid{S, 7};
  const auto vals = m.intensity_grid(t, seq.events, grid);
  const auto xs = grid.xs(), ys = grid.ys();
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = 0; j < 7; ++j) {
      CHECK(vals[i * 7 + j] == doctest::Approx(m.intensity(xs[i], ys[j], t, seq.events)).epsilon(1e-13));
    }
  }

  Rng a(2, "mc"), b(3, "mc");
  const double batched = m.log_likelihood(seq, 20000, a);
  const Integrand f = [&](double x, double y, double s) { return m.influence(x, y, s); };
  const double scalar = mc_log_likelihood(f, m.mu(), 3, seq, McConfig{20000, 0, true}, b);
  CHECK(std::abs(batched - scalar) < 2e-2 * std::max(1.0, std::abs(scalar)));
}

TEST_CASE("tape gradient of the Monte Carlo likelihood matches finite differences") {
  Rng rng(17, "mc-grad");
  const Rect S{0.0, 1.0, 0.0, 1.0};
  autoint::MlpSpec spec = McStppModel::default_spec();
  spec.widths = {3, 4, 1};
  auto m = McStppModel::init(0.9, 20, S, rng, spec);
  const auto seq = testsupport::random_sequence(rng, S, 1.5, 2);
  const auto ex = stpp::make_examples(std::span(&seq, 1));
  const Rng fixed(5, "mc");
  auto value = [&] {
    Rng r = fixed;
    autoint::ValueBackend be;
    return m.batch_log_likelihood(be, ex, 64, r).item();
  };

  numkit::Tape tape;
  autoint::TapeBackend be(tape);
  std::vector<numkit::Var> leaves;
  for (auto* p : m.tensors()) leaves.push_back(be.bind(*p));
  Rng r = fixed;
  const auto ll = m.batch_log_likelihood(be, ex, 64, r);
  CHECK(ll.value().item() == doctest::Approx(value()).epsilon(1e-13));
  const auto grads = tape.backward(ll);
  const auto params = m.tensors();
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (std::size_t i = 0; i < params[k]->size(); ++i) {
      const double orig = params[k]->data()[i], h = 1e-5;
      params[k]->data()[i] = orig + h;
      const double up = value();
      params[k]->data()[i] = orig - h;
      const double dn = value();
      params[k]->data()[i] = orig;
      CHECK(rel_err(grads.of(leaves[k])[i], (up - dn) / (2 * h), 1e-3) < 1e-5);
    }
  }
}

TEST_CASE("Monte Carlo model JSON round trip") {
  Rng rng(18, "mc-json");
  auto m = McStppModel::init(1.3, 7, Rect{0, 2, 0, 1}, rng);
  m.set_influence_enabled(false);
  const nlohmann::json j = m;
  CHECK(j["kind"] == "mc");
  const auto back = j.get<McStppModel>();
  CHECK(back.window() == 7);
  CHECK_FALSE(back.influence_enabled());
  CHECK(back.mlp() == m.mlp());
  CHECK(back.mu() == doctest::Approx(1.3).epsilon(1e-15));
  CHECK_THROWS_AS((nlohmann::json{{"kind", "autostpp"}}.get<McStppModel>()), DataError);
}

TEST_CASE("Monte Carlo baseline trains with the shared loop") {
  const auto full = simulate::simulate(simulate::preset("stsc", "ds1"), 200.0, 3);
  const auto split = simulate::split_dataset(full, 10, 20.0);
  const auto train = simulate::sequences(split.train), val = simulate::sequences(split.val);
  train::TrainConfig cfg;
  cfg.epochs = 3;
  cfg.lr = 0.004;
  cfg.batch = 64;
  const McConfig mc{100};
  auto a = train_mc_model(cfg, mc, simulate::stsc_domain(), train, val);
  auto b = train_mc_model(cfg, mc, simulate::stsc_domain(), train, val);
  CHECK(a.model == b.model);
  CHECK(a.report.log.size() == 4);
  CHECK(a.report.log.back().train_nll < a.report.log.front().train_nll);
  const auto ll = test_ll(a.model, simulate::sequences(split.test), McConfig{2000});
  CHECK(std::isfinite(ll.mean));
  CHECK(ll.n_sequences == split.test.size());
}
