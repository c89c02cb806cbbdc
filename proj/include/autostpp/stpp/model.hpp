#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "autostpp/prodnet/prodsum.hpp"
#include "autostpp/stpp/events.hpp"
#include "json.hpp"

namespace autostpp::stpp {

inline constexpr int kModelFormatVersion = 1;

/// lambda(s, t) = mu + sum over the last W events before t of
/// f(s - s_i, t - t_i), with f a ProdSum. W = 0 keeps the whole history.
class AutoStppModel {
 public:
  AutoStppModel() = default;
  AutoStppModel(double mu, prodnet::ProdSum prodsum, std::size_t window, Rect domain);

  static AutoStppModel init(std::size_t n_terms, const autoint::MlpSpec& factor_spec, double mu,
                            std::size_t window, Rect domain, Rng& rng);

  double mu() const;
  void set_mu(double mu);
  // mu = exp(log_mu); the trainable form.
  numkit::Tensor& log_mu() { return log_mu_; }
  const numkit::Tensor& log_mu() const { return log_mu_; }

  const prodnet::ProdSum& prodsum() const { return prodsum_; }
  prodnet::ProdSum& prodsum() { return prodsum_; }
  std::size_t window() const { return window_; }
  const Rect& domain() const { return domain_; }

  // With influence disabled the model is a homogeneous Poisson process and
  // the ProdSum is excluded from tensors().
  bool influence_enabled() const { return influence_; }
  void set_influence_enabled(bool on) { influence_ = on; }

  // log_mu first, then the ProdSum tensors.
  std::vector<numkit::Tensor*> tensors();
  std::vector<const numkit::Tensor*> tensors() const;

  double intensity(double x, double y, double t, std::span<const Event> events) const;

  friend bool operator==(const AutoStppModel&, const AutoStppModel&) = default;

 private:
  numkit::Tensor log_mu_{numkit::Tensor::scalar(0.0)};
  prodnet::ProdSum prodsum_;
  std::size_t window_ = 20;
  Rect domain_;
  bool influence_ = true;
};

// {"version", "mu", "W", "domain", "influence", "prodsum"}
void to_json(nlohmann::json& j, const AutoStppModel& m);
void from_json(const nlohmann::json& j, AutoStppModel& m);

/// The log-likelihood split into one additive piece per event.
///
/// Event j of a sequence contributes log lambda(s_j, t_j), minus the integral
/// of its own influence over S x (t_j, min(T, t_{j+W})] (the span in which it
/// is among the last W events), minus mu |S| (t_j - t_{j-1}); the last event
/// also takes mu |S| (T - t_j). An empty sequence is a single example with
/// only the background term. The pieces sum to the sequence log-likelihood.
struct ExampleRef {
  const EventSequence* seq = nullptr;
  std::size_t index = 0;
};

std::vector<ExampleRef> make_examples(std::span<const EventSequence> seqs);

/// Flattened inputs for a set of examples.
struct LikelihoodBatch {
  std::size_t n_examples = 0;
  std::size_t n_targets = 0;
  // Displacements of (target, history) pairs, each [P, 1].
  numkit::Tensor dx, dy, dt;
  std::vector<std::size_t> pair_target;
  // Per-event integration boxes in displacement coordinates, each [C, 1].
  std::array<numkit::Tensor, 3> lo, hi;
  // sum over examples of |S| times the background time span.
  double background_measure = 0.0;
};

LikelihoodBatch build_batch(std::span<const ExampleRef> examples, std::size_t window);

template <class Be>
struct BoundModel {
  typename Be::Value log_mu;
  std::optional<prodnet::BoundProdSum<Be>> prodsum;
};

template <class Be>
BoundModel<Be> bind(Be& be, const AutoStppModel& m);

/// Sum of the example log-likelihoods in the batch, shape [1].
template <class Be>
typename Be::Value batch_log_likelihood(Be& be, const BoundModel<Be>& m, const LikelihoodBatch& b);

extern template BoundModel<autoint::ValueBackend> bind(autoint::ValueBackend&,
                                                       const AutoStppModel&);
extern template BoundModel<autoint::TapeBackend> bind(autoint::TapeBackend&, const AutoStppModel&);
extern template numkit::Tensor batch_log_likelihood(autoint::ValueBackend&,
                                                    const BoundModel<autoint::ValueBackend>&,
                                                    const LikelihoodBatch&);
extern template numkit::Var batch_log_likelihood(autoint::TapeBackend&,
                                                 const BoundModel<autoint::TapeBackend>&,
                                                 const LikelihoodBatch&);

/// Exact log-likelihood of one sequence (DataError if it is invalid).
double log_likelihood(const AutoStppModel& m, const EventSequence& seq);

/// lambda(., t) at the points of `grid` given `events` (those before t are
/// used). Values are indexed as Grid documents.
std::vector<double> intensity_grid(const AutoStppModel& m, double t, std::span<const Event> events,
                                   const Grid& grid);

/// lambda(., t) on the grid normalised to a multinomial distribution.
GridDist conditional_spatial_density(const AutoStppModel& m, double t,
                                     std::span<const Event> events, const Grid& grid);

}  // namespace autostpp::stpp
