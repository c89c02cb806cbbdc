#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "autostpp/autoint/mlp.hpp"
#include "autostpp/evaluate/metrics.hpp"
#include "autostpp/prodnet/prodsum.hpp"
#include "autostpp/rng.hpp"
#include "autostpp/stpp/model.hpp"
#include "autostpp/train/fit.hpp"
#include "json.hpp"

namespace autostpp::baselines {

struct McConfig {
  std::size_t n_samples = 1000;  // per integral
  std::uint64_t seed = 0;
  // One sample per cell of an m x m x m partition (m^3 <= n_samples).
  bool stratified = false;

  void validate() const;  // DomainError when n_samples == 0
};

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

using Integrand = std::function<double(double, double, double)>;

/// volume * mean f over uniform samples in the cuboid.
McEstimate mc_integrate(const Integrand& f, const prodnet::Cuboid& c, const McConfig& cfg, Rng& rng);
/// As above with the "mc" stream of cfg.seed.
McEstimate mc_integrate(const Integrand& f, const prodnet::Cuboid& c, const McConfig& cfg);

/// Log-likelihood of lambda = mu + sum over the last `window` events of
/// influence(s - s_i, t - t_i), split per event as stpp does, with every
/// influence integral replaced by mc_integrate.
double mc_log_likelihood(const Integrand& influence, double mu, std::size_t window,
                         const stpp::EventSequence& seq, const McConfig& cfg, Rng& rng);

/// Same background and history structure as AutoSTPP, but the influence is a
/// free MLP of (dx, dy, dt) with a softplus output, integrated by Monte Carlo.
class McStppModel {
 public:
  // widths {3, 32, 32, 1}, tanh, bias, free weights
  static autoint::MlpSpec default_spec();
  static McStppModel init(double mu, std::size_t window, const stpp::Rect& domain, Rng& rng,
                          const autoint::MlpSpec& spec = default_spec());

  double mu() const { return std::exp(log_mu_.item()); }
  void set_mu(double mu);
  const autoint::ParamSet& mlp() const { return mlp_; }
  std::size_t window() const { return window_; }
  const stpp::Rect& domain() const { return domain_; }
  bool influence_enabled() const { return influence_; }
  void set_influence_enabled(bool on) { influence_ = on; }

  // log_mu first, then the MLP tensors when the influence is enabled.
  std::vector<numkit::Tensor*> tensors();

  // x is [P, 3] displacements; returns [P, 1].
  numkit::Tensor influence(const numkit::Tensor& x) const;
  double influence(double dx, double dy, double dt) const;
  double intensity(double x, double y, double t, std::span<const stpp::Event> events) const;
  std::vector<double> intensity_grid(double t, std::span<const stpp::Event> events,
                                     const stpp::Grid& grid) const;

  /// Summed log-likelihood of the examples with fresh Monte Carlo samples.
  template <class Be>
  typename Be::Value batch_log_likelihood(Be& be, std::span<const stpp::ExampleRef> ex,
                                          std::size_t n_samples, Rng& rng) const;
  double log_likelihood(const stpp::EventSequence& seq, std::size_t n_samples, Rng& rng) const;

  friend bool operator==(const McStppModel&, const McStppModel&) = default;
  friend void to_json(nlohmann::json& j, const McStppModel& m);
  friend void from_json(const nlohmann::json& j, McStppModel& m);

 private:
  numkit::Tensor log_mu_{numkit::Tensor::scalar(0.0)};
  autoint::ParamSet mlp_;
  std::size_t window_ = 20;
  stpp::Rect domain_;
  bool influence_ = true;
};

class McObjective : public train::Objective {
 public:
  McObjective(McStppModel& m, std::size_t n_samples) : m_(&m), n_(n_samples) {}
  std::vector<numkit::Tensor*> tensors() override { return m_->tensors(); }
  numkit::Var log_likelihood(autoint::TapeBackend& be, std::span<const stpp::ExampleRef> ex,
                             Rng& rng) override;
  double log_likelihood(std::span<const stpp::ExampleRef> ex, Rng& rng) override;

 private:
  McStppModel* m_;
  std::size_t n_;
};

evaluate::GridIntensity model_intensity(const McStppModel& m);
/// Estimated LL per sequence.
evaluate::LlSummary test_ll(const McStppModel& m, std::span<const stpp::EventSequence> seqs,
                            const McConfig& cfg);

struct TrainedMc {
  McStppModel model;
  train::FitReport report;
};

/// The AutoSTPP training loop (same config, batches and lr grid) on the
/// Monte Carlo likelihood.
TrainedMc train_mc_model(const train::TrainConfig& cfg, const McConfig& mc, const stpp::Rect& domain,
                         std::span<const stpp::EventSequence> train,
                         std::span<const stpp::EventSequence> val, const train::MessageSink& sink = {});

}  // namespace autostpp::baselines
