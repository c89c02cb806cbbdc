#include "autostpp/baselines/mc.hpp"

#include <cmath>

#include "autostpp/autoint/dnforward.hpp"
#include "autostpp/errors.hpp"
#include "autostpp/io.hpp"

namespace autostpp::baselines {

using numkit::Tensor;
using numkit::Var;
using stpp::Event;
using stpp::EventSequence;
using stpp::ExampleRef;

namespace {

constexpr std::size_t kEvalChunk = 256;

Tensor stack_columns(const Tensor& a, const Tensor& b, const Tensor& c) {
  const std::size_t n = a.rows();
  Tensor out({n, 3});
  for (std::size_t i = 0; i < n; ++i) {
    out[3 * i] = a[i];
    out[3 * i + 1] = b[i];
    out[3 * i + 2] = c[i];
  }
  return out;
}

}  // namespace

void McConfig::validate() const {
  if (n_samples == 0) throw DomainError("Monte Carlo needs at least one sample");
}

McEstimate mc_integrate(const Integrand& f, const prodnet::Cuboid& c, const McConfig& cfg, Rng& rng) {
  cfg.validate();
  c.validate();
  const double vol = c.volume();
  std::array<double, 3> width;
  for (int k = 0; k < 3; ++k) width[k] = c.hi[k] - c.lo[k];
  McEstimate est;

  if (!cfg.stratified) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
      const double v = f(c.lo[0] + width[0] * rng.uniform(), c.lo[1] + width[1] * rng.uniform(),
                         c.lo[2] + width[2] * rng.uniform());
      sum += v;
      sq += v * v;
    }
    const double n = static_cast<double>(cfg.n_samples);
    const double mean = sum / n;
    const double var = cfg.n_samples > 1 ? std::max(sq - n * mean * mean, 0.0) / (n - 1.0) : 0.0;
    est.estimate = vol * mean;
    est.std_error = vol * std::sqrt(var / n);
    return est;
  }

  auto m = static_cast<std::size_t>(std::cbrt(static_cast<double>(cfg.n_samples)) + 1e-9);
  m = std::max<std::size_t>(m, 1);
  const double cells = static_cast<double>(m * m * m);
  double sum = 0.0, pair_sq = 0.0, prev = 0.0;
  std::size_t idx = 0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      for (std::size_t d = 0; d < m; ++d, ++idx) {
        const double h = 1.0 / static_cast<double>(m);
        const double v = f(c.lo[0] + width[0] * h * (static_cast<double>(a) + rng.uniform()),
                           c.lo[1] + width[1] * h * (static_cast<double>(b) + rng.uniform()),
                           c.lo[2] + width[2] * h * (static_cast<double>(d) + rng.uniform()));
        sum += v;
        // Neighbouring cells in pairs: each squared difference estimates
        // twice the within-cell variance.
        if (idx % 2 == 1) pair_sq += (v - prev) * (v - prev);
        prev = v;
      }
    }
  }
  est.estimate = vol * sum / cells;
  est.std_error = vol / cells * std::sqrt(pair_sq);
  return est;
}

McEstimate mc_integrate(const Integrand& f, const prodnet::Cuboid& c, const McConfig& cfg) {
  Rng rng(cfg.seed, "mc");
  return mc_integrate(f, c, cfg, rng);
}

double mc_log_likelihood(const Integrand& influence, double mu, std::size_t window, const EventSequence& seq,
                         const McConfig& cfg, Rng& rng) {
  seq.validate();
  const auto& S = seq.domain;
  const auto& ev = seq.events;
  double ll = -mu * S.area() * seq.T;
  for (std::size_t j = 0; j < ev.size(); ++j) {
    const Event& e = ev[j];
    double lambda = mu;
    for (const auto& h : stpp::history_before(std::span(ev).first(j), e.t, window)) {
      lambda += influence(e.x - h.x, e.y - h.y, e.t - h.t);
    }
    ll += std::log(lambda);
    const double until = (window > 0 && j + window < ev.size()) ? ev[j + window].t : seq.T;
    const prodnet::Cuboid box{{S.x0 - e.x, S.y0 - e.y, 0.0}, {S.x1 - e.x, S.y1 - e.y, until - e.t}};
    ll -= mc_integrate(influence, box, cfg, rng).estimate;
  }
  return ll;
}

autoint::MlpSpec McStppModel::default_spec() {
  autoint::MlpSpec spec;
  spec.widths = {3, 32, 32, 1};
  spec.activation = autoint::Activation(autoint::ActivationKind::Tanh);
  spec.bias = true;
  spec.weights = autoint::WeightMode::Free;
  return spec;
}

McStppModel McStppModel::init(double mu, std::size_t window, const stpp::Rect& domain, Rng& rng,
                              const autoint::MlpSpec& spec) {
  if (spec.input_dim() != 3 || spec.widths.back() != 1) {
    throw ShapeError("Monte Carlo influence network must map 3 inputs to 1 output");
  }
  domain.validate();
  McStppModel m;
  m.set_mu(mu);
  m.mlp_ = autoint::ParamSet::init(spec, rng);
  // Start near the background-only model: softplus(bias) = 0.01.
  auto& out = m.mlp_.layers().back();
  for (auto& b : out.b.data()) b = std::log(std::expm1(0.01));
  m.window_ = window;
  m.domain_ = domain;
  return m;
}

void McStppModel::set_mu(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("background rate mu must be positive");
  log_mu_ = Tensor::scalar(std::log(mu));
}

std::vector<Tensor*> McStppModel::tensors() {
  std::vector<Tensor*> out{&log_mu_};
  if (influence_) {
    for (auto* t : mlp_.tensors()) out.push_back(t);
  }
  return out;
}

Tensor McStppModel::influence(const Tensor& x) const {
  if (!influence_) return Tensor({x.rows(), 1});
  return numkit::softplus(autoint::integral_forward(mlp_, x));
}

double McStppModel::influence(double dx, double dy, double dt) const {
  return influence(Tensor({1, 3}, {dx, dy, dt})).item();
}

double McStppModel::intensity(double x, double y, double t, std::span<const Event> events) const {
  double lambda = mu();
  for (const auto& e : stpp::history_before(events, t, window_)) lambda += influence(x - e.x, y - e.y, t - e.t);
  return lambda;
}

std::vector<double> McStppModel::intensity_grid(double t, std::span<const Event> events,
                                                const stpp::Grid& grid) const {
  const std::size_t k = grid.k;
  std::vector<double> out(k * k, mu());
  if (!influence_) return out;
  const auto xs = grid.xs(), ys = grid.ys();
  Tensor x({k * k, 3});
  for (const auto& e : stpp::history_before(events, t, window_)) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t r = i * k + j;
        x[3 * r] = xs[i] - e.x;
        x[3 * r + 1] = ys[j] - e.y;
        x[3 * r + 2] = t - e.t;
      }
    }
    const Tensor f = influence(x);
    for (std::size_t r = 0; r < k * k; ++r) out[r] += f[r];
  }
  return out;
}

template <class Be>
typename Be::Value McStppModel::batch_log_likelihood(Be& be, std::span<const ExampleRef> ex,
                                                     std::size_t n_samples, Rng& rng) const {
  using V = typename Be::Value;
  if (n_samples == 0) throw DomainError("Monte Carlo needs at least one sample");
  const auto b = stpp::build_batch(ex, window_);
  V mu = exp(V(be.param(log_mu_)));
  V ll = scale(mu, -b.background_measure);
  if (b.n_targets == 0) return ll;

  V lambda = add(be.constant(Tensor({b.n_targets, 1})), mu);
  if (!influence_) return add(ll, sum(log(lambda)));

  const auto net = autoint::bind(be, mlp_);
  if (!b.pair_target.empty()) {
    V f = softplus(autoint::integral_forward(be, net, be.constant(stack_columns(b.dx, b.dy, b.dt))));
    lambda = add(segment_sum(f, b.pair_target, b.n_targets), mu);
  }
  ll = add(ll, sum(log(lambda)));

  const std::size_t boxes = b.lo[0].rows();
  Tensor u({boxes * n_samples, 3}), w({boxes * n_samples, 1});
  for (std::size_t c = 0; c < boxes; ++c) {
    double vol = 1.0;
    for (int k = 0; k < 3; ++k) vol *= b.hi[k][c] - b.lo[k][c];
    for (std::size_t s = 0; s < n_samples; ++s) {
      const std::size_t r = c * n_samples + s;
      for (int k = 0; k < 3; ++k) u[3 * r + k] = b.lo[k][c] + (b.hi[k][c] - b.lo[k][c]) * rng.uniform();
      w[r] = vol / static_cast<double>(n_samples);
    }
  }
  V g = softplus(autoint::integral_forward(be, net, be.constant(std::move(u))));
  return sub(ll, sum(mul(g, be.constant(std::move(w)))));
}

template Tensor McStppModel::batch_log_likelihood(autoint::ValueBackend&, std::span<const ExampleRef>,
                                                  std::size_t, Rng&) const;
template Var McStppModel::batch_log_likelihood(autoint::TapeBackend&, std::span<const ExampleRef>,
                                               std::size_t, Rng&) const;

double McStppModel::log_likelihood(const EventSequence& seq, std::size_t n_samples, Rng& rng) const {
  seq.validate();
  const auto ex = stpp::make_examples(std::span(&seq, 1));
  autoint::ValueBackend be;
  double total = 0.0;
  for (std::size_t i = 0; i < ex.size(); i += kEvalChunk) {
    total += batch_log_likelihood(be, std::span(ex).subspan(i, std::min(kEvalChunk, ex.size() - i)),
                                  n_samples, rng)
                 .item();
  }
  return total;
}

void to_json(nlohmann::json& j, const McStppModel& m) {
  j = nlohmann::json{{"version", stpp::kModelFormatVersion},
                     {"kind", "mc"},
                     {"mu", m.mu()},
                     {"W", m.window_},
                     {"domain", m.domain_},
                     {"influence", m.influence_},
                     {"mlp", m.mlp_}};
}

void from_json(const nlohmann::json& j, McStppModel& m) {
  if (j.value("kind", std::string()) != "mc") throw DataError("not a Monte Carlo STPP model");
  const int version = j.value("version", stpp::kModelFormatVersion);
  if (version != stpp::kModelFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }
  McStppModel out;
  out.set_mu(j.at("mu").get<double>());
  out.mlp_ = j.at("mlp").get<autoint::ParamSet>();
  out.window_ = j.value("W", std::size_t{20});
  out.domain_ = j.at("domain").get<stpp::Rect>();
  out.influence_ = j.value("influence", true);
  m = std::move(out);
}

Var McObjective::log_likelihood(autoint::TapeBackend& be, std::span<const ExampleRef> ex, Rng& rng) {
  return m_->batch_log_likelihood(be, ex, n_, rng);
}

double McObjective::log_likelihood(std::span<const ExampleRef> ex, Rng& rng) {
  autoint::ValueBackend be;
  double total = 0.0;
  for (std::size_t i = 0; i < ex.size(); i += kEvalChunk) {
    total += m_->batch_log_likelihood(be, ex.subspan(i, std::min(kEvalChunk, ex.size() - i)), n_, rng).item();
  }
  return total;
}

evaluate::GridIntensity model_intensity(const McStppModel& m) {
  return [&m](const evaluate::EvalPoint& at, const stpp::Grid& grid) {
    return m.intensity_grid(at.t_local, at.window_events, grid);
  };
}

evaluate::LlSummary test_ll(const McStppModel& m, std::span<const EventSequence> seqs, const McConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed, "mc-eval");
  std::vector<double> lls;
  std::size_t events = 0;
  for (const auto& s : seqs) {
    lls.push_back(m.log_likelihood(s, cfg.n_samples, rng));
    events += s.size();
  }
  return evaluate::summarize_ll(lls, events);
}

TrainedMc train_mc_model(const train::TrainConfig& cfg, const McConfig& mc, const stpp::Rect& domain,
                         std::span<const EventSequence> train, std::span<const EventSequence> val,
                         const train::MessageSink& sink) {
  mc.validate();
  const std::vector<double> rates = cfg.lr_grid.empty() ? std::vector<double>{cfg.lr} : cfg.lr_grid;
  // Background starts where AutoSTPP's does.
  const double mu = train::init_model(cfg, domain, train).mu();
  std::optional<TrainedMc> best;
  for (double lr : rates) {
    train::TrainConfig c = cfg;
    c.lr = lr;
    Rng rng(c.seed, "init");
    TrainedMc run{McStppModel::init(mu, c.window, domain, rng), {}};
    if (c.freeze_influence) run.model.set_influence_enabled(false);
    McObjective obj(run.model, mc.n_samples);
    run.report = train::fit(obj, train, val, c, sink);
    if (sink) {
      sink("mc lr " + format_double(lr) + ": best epoch " + std::to_string(run.report.best_epoch) + ", NLL " +
           format_double(run.report.best_val_nll));
    }
    if (!best || run.report.best_val_nll < best->report.best_val_nll) best = std::move(run);
  }
  return std::move(*best);
}

}  // namespace autostpp::baselines
