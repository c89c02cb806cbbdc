#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "autostpp/numkit/tape.hpp"
#include "autostpp/rng.hpp"
#include "autostpp/stpp/model.hpp"
#include "autostpp/train/config.hpp"

namespace autostpp::train {

/// What the training loop needs from a model: its parameters and the summed
/// log-likelihood of a set of examples, recorded on a tape or evaluated plainly.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::vector<numkit::Tensor*> tensors() = 0;
  // tensors() are already bound on `be`. Returns a [1] Var.
  virtual numkit::Var log_likelihood(autoint::TapeBackend& be, std::span<const stpp::ExampleRef> ex,
                                     Rng& rng) = 0;
  virtual double log_likelihood(std::span<const stpp::ExampleRef> ex, Rng& rng) = 0;
};

/// Exact AutoSTPP likelihood of a model held by reference.
class StppObjective : public Objective {
 public:
  explicit StppObjective(stpp::AutoStppModel& m) : m_(&m) {}
  std::vector<numkit::Tensor*> tensors() override { return m_->tensors(); }
  numkit::Var log_likelihood(autoint::TapeBackend& be, std::span<const stpp::ExampleRef> ex,
                             Rng& rng) override;
  double log_likelihood(std::span<const stpp::ExampleRef> ex, Rng& rng) override;

 private:
  stpp::AutoStppModel* m_;
};

/// Summed exact log-likelihood of the examples, evaluated in chunks.
double total_log_likelihood(const stpp::AutoStppModel& m, std::span<const stpp::ExampleRef> ex);
/// Negative log-likelihood per example (per event) over the sequences.
double mean_nll(const stpp::AutoStppModel& m, std::span<const stpp::EventSequence> seqs);

struct EpochLog {
  std::size_t epoch = 0;
  double train_nll = 0.0;  // per example, after the epoch
  double val_nll = 0.0;
  double wall_ms = 0.0;
  std::size_t clipped_steps = 0;
};

struct FitReport {
  std::vector<EpochLog> log;  // entry 0 is the initial model
  std::size_t best_epoch = 0;
  double best_val_nll = 0.0;
  double lr = 0.0;
  bool diverged = false;
  std::string message;
};

using MessageSink = std::function<void(const std::string&)>;

/// Adam on the negative mean log-likelihood with shuffled batches of
/// cfg.batch examples. On return the objective holds the parameters of the
/// epoch with the best validation NLL (training NLL when `val` is empty). A
/// non-finite loss or gradient halts training at that checkpoint.
FitReport fit(Objective& obj, std::span<const stpp::EventSequence> train,
              std::span<const stpp::EventSequence> val, const TrainConfig& cfg,
              const MessageSink& sink = {});

/// Model initialised from the configuration: background at the empirical
/// rate of `train`, random ProdSum from the "init" stream of cfg.seed.
stpp::AutoStppModel init_model(const TrainConfig& cfg, const stpp::Rect& domain,
                               std::span<const stpp::EventSequence> train);

struct TrainedModel {
  stpp::AutoStppModel model;
  FitReport report;
};

/// init_model + fit, repeated over cfg.lr_grid (or cfg.lr alone); keeps the
/// run with the best validation NLL.
TrainedModel train_model(const TrainConfig& cfg, const stpp::Rect& domain,
                         std::span<const stpp::EventSequence> train,
                         std::span<const stpp::EventSequence> val, const MessageSink& sink = {});

/// CSV with header epoch,train_nll,val_nll,wall_ms.
void write_log_csv(const std::filesystem::path& path, const std::vector<EpochLog>& log);

}  // namespace autostpp::train
