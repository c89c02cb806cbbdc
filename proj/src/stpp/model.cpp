#include "autostpp/stpp/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "autostpp/errors.hpp"
#include "autostpp/numkit/ops.hpp"

namespace autostpp::stpp {

using autoint::TapeBackend;
using autoint::ValueBackend;
using numkit::Tensor;
using numkit::Var;

AutoStppModel::AutoStppModel(double mu, prodnet::ProdSum prodsum, std::size_t window, Rect domain)
    : prodsum_(std::move(prodsum)), window_(window), domain_(domain) {
  set_mu(mu);
  domain_.validate();
}

AutoStppModel AutoStppModel::init(std::size_t n_terms, const autoint::MlpSpec& factor_spec,
                                  double mu, std::size_t window, Rect domain, Rng& rng) {
  return AutoStppModel(mu, prodnet::ProdSum::init(n_terms, factor_spec, rng), window, domain);
}

double AutoStppModel::mu() const { return std::exp(log_mu_.item()); }

void AutoStppModel::set_mu(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw DomainError("background intensity must be positive, got " + std::to_string(mu));
  }
  log_mu_ = Tensor::scalar(std::log(mu));
}

std::vector<Tensor*> AutoStppModel::tensors() {
  std::vector<Tensor*> out{&log_mu_};
  if (influence_) {
    for (auto* t : prodsum_.tensors()) out.push_back(t);
  }
  return out;
}

std::vector<const Tensor*> AutoStppModel::tensors() const {
  std::vector<const Tensor*> out{&log_mu_};
  if (influence_) {
    for (auto* t : prodsum_.tensors()) out.push_back(t);
  }
  return out;
}

double AutoStppModel::intensity(double x, double y, double t, std::span<const Event> events) const {
  const auto hist = history_before(events, t, window_);
  double lambda = mu();
  if (!influence_ || hist.empty()) return lambda;
  const std::size_t n = hist.size();
  std::array<Tensor, 3> d{Tensor({n, 1}), Tensor({n, 1}), Tensor({n, 1})};
  for (std::size_t i = 0; i < n; ++i) {
    d[0][i] = x - hist[i].x;
    d[1][i] = y - hist[i].y;
    d[2][i] = t - hist[i].t;
  }
  ValueBackend be;
  auto bound = prodnet::bind(be, prodsum_);
  Tensor f = prodnet::influence(be, bound, d);
  for (double v : f.data()) lambda += v;
  return lambda;
}

void to_json(nlohmann::json& j, const AutoStppModel& m) {
  j = nlohmann::json{{"version", kModelFormatVersion},
                     {"mu", m.mu()},
                     {"W", m.window()},
                     {"domain", m.domain()},
                     {"influence", m.influence_enabled()},
                     {"prodsum", m.prodsum()}};
}

void from_json(const nlohmann::json& j, AutoStppModel& m) {
  const int version = j.value("version", kModelFormatVersion);
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }
  m = AutoStppModel(j.at("mu").get<double>(), j.at("prodsum").get<prodnet::ProdSum>(),
                    j.value("W", std::size_t{20}), j.at("domain").get<Rect>());
  m.set_influence_enabled(j.value("influence", true));
}

std::vector<ExampleRef> make_examples(std::span<const EventSequence> seqs) {
  std::vector<ExampleRef> out;
  for (const auto& seq : seqs) {
    if (seq.events.empty()) {
      out.push_back({&seq, 0});
      continue;
    }
    for (std::size_t j = 0; j < seq.events.size(); ++j) out.push_back({&seq, j});
  }
  return out;
}

LikelihoodBatch build_batch(std::span<const ExampleRef> examples, std::size_t window) {
  LikelihoodBatch b;
  b.n_examples = examples.size();
  std::vector<double> dx, dy, dt;
  std::array<std::vector<double>, 3> lo, hi;
  for (const auto& ex : examples) {
    const EventSequence& seq = *ex.seq;
    const Rect& S = seq.domain;
    const auto& ev = seq.events;
    if (ev.empty()) {
      b.background_measure += S.area() * seq.T;
      continue;
    }
    const std::size_t j = ex.index;
    if (j >= ev.size()) throw std::out_of_range("example index past the end of its sequence");
    const Event& e = ev[j];
    const std::size_t target = b.n_targets++;
    const std::size_t first = (window > 0 && j > window) ? j - window : 0;
    for (std::size_t i = first; i < j; ++i) {
      dx.push_back(e.x - ev[i].x);
      dy.push_back(e.y - ev[i].y);
      dt.push_back(e.t - ev[i].t);
      b.pair_target.push_back(target);
    }
    const double until = (window > 0 && j + window < ev.size()) ? ev[j + window].t : seq.T;
    lo[0].push_back(S.x0 - e.x);
    hi[0].push_back(S.x1 - e.x);
    lo[1].push_back(S.y0 - e.y);
    hi[1].push_back(S.y1 - e.y);
    lo[2].push_back(0.0);
    hi[2].push_back(until - e.t);
    double span = e.t - (j > 0 ? ev[j - 1].t : 0.0);
    if (j + 1 == ev.size()) span += seq.T - e.t;
    b.background_measure += S.area() * span;
  }
  auto column = [](std::vector<double>& v) {
    const std::size_t n = v.size();
    return Tensor({n, 1}, std::move(v));
  };
  b.dx = column(dx);
  b.dy = column(dy);
  b.dt = column(dt);
  for (int k = 0; k < 3; ++k) {
    b.lo[k] = column(lo[k]);
    b.hi[k] = column(hi[k]);
  }
  return b;
}

template <class Be>
BoundModel<Be> bind(Be& be, const AutoStppModel& m) {
  BoundModel<Be> out{typename Be::Value(be.param(m.log_mu())), std::nullopt};
  if (m.influence_enabled()) out.prodsum = prodnet::bind(be, m.prodsum());
  return out;
}

template <class Be>
typename Be::Value batch_log_likelihood(Be& be, const BoundModel<Be>& m, const LikelihoodBatch& b) {
  using V = typename Be::Value;
  V mu = exp(m.log_mu);
  V ll = scale(mu, -b.background_measure);
  if (b.n_targets == 0) return ll;

  V lambda = add(be.constant(Tensor({b.n_targets, 1})), mu);
  if (m.prodsum && !b.pair_target.empty()) {
    V f = prodnet::influence(be, *m.prodsum, {be.constant(b.dx), be.constant(b.dy),
                                              be.constant(b.dt)});
    lambda = add(segment_sum(f, b.pair_target, b.n_targets), mu);
  }
  ll = add(ll, sum(log(lambda)));
  if (m.prodsum) {
    V comp = prodnet::box_integral(
        be, *m.prodsum, {be.constant(b.lo[0]), be.constant(b.lo[1]), be.constant(b.lo[2])},
        {be.constant(b.hi[0]), be.constant(b.hi[1]), be.constant(b.hi[2])});
    ll = sub(ll, sum(comp));
  }
  return ll;
}

template BoundModel<ValueBackend> bind(ValueBackend&, const AutoStppModel&);
template BoundModel<TapeBackend> bind(TapeBackend&, const AutoStppModel&);
template Tensor batch_log_likelihood(ValueBackend&, const BoundModel<ValueBackend>&,
                                     const LikelihoodBatch&);
template Var batch_log_likelihood(TapeBackend&, const BoundModel<TapeBackend>&,
                                  const LikelihoodBatch&);

double log_likelihood(const AutoStppModel& m, const EventSequence& seq) {
  seq.validate();
  const auto examples = make_examples(std::span<const EventSequence>(&seq, 1));
  const LikelihoodBatch batch = build_batch(examples, m.window());
  ValueBackend be;
  return batch_log_likelihood(be, bind(be, m), batch).item();
}

std::vector<double> intensity_grid(const AutoStppModel& m, double t, std::span<const Event> events,
                                   const Grid& grid) {
  const std::size_t k = grid.k;
  std::vector<double> out(k * k, m.mu());
  const auto hist = history_before(events, t, m.window());
  if (!m.influence_enabled() || hist.empty()) return out;

  // The influence is a sum of products, so each history event needs the x
  // factors on k points, the y factors on k points and one t factor.
  const std::size_t h = hist.size();
  const auto xs = grid.xs(), ys = grid.ys();
  Tensor dx({h * k, 1}), dy({h * k, 1}), dt({h, 1});
  for (std::size_t e = 0; e < h; ++e) {
    for (std::size_t i = 0; i < k; ++i) {
      dx[e * k + i] = xs[i] - hist[e].x;
      dy[e * k + i] = ys[i] - hist[e].y;
    }
    dt[e] = t - hist[e].t;
  }
  const autoint::DerivSpec first{{0}};
  for (const auto& term : m.prodsum().terms()) {
    Tensor fx = autoint::dnforward(term.factor[0], dx, first);
    Tensor fy = autoint::dnforward(term.factor[1], dy, first);
    Tensor ft = autoint::dnforward(term.factor[2], dt, first);
    for (std::size_t e = 0; e < h; ++e) {
      for (std::size_t i = 0; i < k; ++i) {
        const double a = ft[e] * fx[e * k + i];
        double* row = out.data() + i * k;
        const double* fyr = fy.ptr() + e * k;
        for (std::size_t j = 0; j < k; ++j) row[j] += a * fyr[j];
      }
    }
  }
  return out;
}

GridDist conditional_spatial_density(const AutoStppModel& m, double t,
                                     std::span<const Event> events, const Grid& grid) {
  return normalize(grid.k, intensity_grid(m, t, events, grid));
}

}  // namespace autostpp::stpp
