#include "autostpp/train/fit.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "autostpp/errors.hpp"
#include "autostpp/io.hpp"

namespace autostpp::train {

using numkit::Tensor;
using numkit::Var;
using stpp::AutoStppModel;
using stpp::EventSequence;
using stpp::ExampleRef;

namespace {

constexpr std::size_t kEvalChunk = 1024;

std::vector<Tensor> snapshot(const std::vector<Tensor*>& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (auto* p : params) out.push_back(*p);
  return out;
}

void restore(const std::vector<Tensor*>& params, const std::vector<Tensor>& values) {
  for (std::size_t k = 0; k < params.size(); ++k) *params[k] = values[k];
}

}  // namespace

Var StppObjective::log_likelihood(autoint::TapeBackend& be, std::span<const ExampleRef> ex, Rng&) {
  const auto batch = stpp::build_batch(ex, m_->window());
  return stpp::batch_log_likelihood(be, stpp::bind(be, *m_), batch);
}

double StppObjective::log_likelihood(std::span<const ExampleRef> ex, Rng&) {
  return total_log_likelihood(*m_, ex);
}

double total_log_likelihood(const AutoStppModel& m, std::span<const ExampleRef> ex) {
  autoint::ValueBackend be;
  const auto bound = stpp::bind(be, m);
  double total = 0.0;
  for (std::size_t i = 0; i < ex.size(); i += kEvalChunk) {
    const auto chunk = ex.subspan(i, std::min(kEvalChunk, ex.size() - i));
    total += stpp::batch_log_likelihood(be, bound, stpp::build_batch(chunk, m.window())).item();
  }
  return total;
}

double mean_nll(const AutoStppModel& m, std::span<const EventSequence> seqs) {
  const auto ex = stpp::make_examples(seqs);
  if (ex.empty()) return 0.0;
  return -total_log_likelihood(m, ex) / static_cast<double>(ex.size());
}

FitReport fit(Objective& obj, std::span<const EventSequence> train, std::span<const EventSequence> val,
              const TrainConfig& cfg, const MessageSink& sink) {
  cfg.validate();
  auto say = [&](const std::string& msg) {
    if (sink) sink(msg);
  };
  const auto train_ex = stpp::make_examples(train);
  const auto val_ex = stpp::make_examples(val);
  if (train_ex.empty()) throw DataError("no training sequences");
  const auto params = obj.tensors();
  const AdamConfig adam = cfg.adam();
  AdamState state;
  Rng order_rng(cfg.seed, "train");
  Rng step_rng(cfg.seed, "mc");

  auto nll = [&](const std::vector<ExampleRef>& ex) {
    if (ex.empty()) return 0.0;
    Rng eval_rng(cfg.seed, "eval");
    return -obj.log_likelihood(ex, eval_rng) / static_cast<double>(ex.size());
  };
  auto selection = [&](const EpochLog& e) { return val_ex.empty() ? e.train_nll : e.val_nll; };

  FitReport report;
  auto diverge = [&](const std::exception& e, std::size_t epoch) {
    report.diverged = true;
    report.message = std::string(e.what()) + " at epoch " + std::to_string(epoch);
  };
  report.lr = cfg.lr;
  EpochLog first;
  first.train_nll = nll(train_ex);
  first.val_nll = nll(val_ex);
  report.log.push_back(first);
  report.best_val_nll = selection(first);
  if (!std::isfinite(report.best_val_nll)) {
    report.diverged = true;
    report.message = "initial model has a non-finite log-likelihood";
    say(report.message);
    return report;
  }
  std::vector<Tensor> best = snapshot(params);

  std::vector<std::size_t> order(train_ex.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<ExampleRef> batch;
  for (std::size_t epoch = 1; epoch <= cfg.epochs && !report.diverged; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[order_rng.index(i)]);

    EpochLog log;
    log.epoch = epoch;
    for (std::size_t b = 0; b < order.size() && !report.diverged; b += cfg.batch) {
      batch.clear();
      for (std::size_t i = b; i < std::min(order.size(), b + cfg.batch); ++i) batch.push_back(train_ex[order[i]]);

      try {
        numkit::Tape tape;
        autoint::TapeBackend be(tape);
        std::vector<Var> leaves;
        for (auto* p : params) leaves.push_back(be.bind(*p));
        const Var ll = obj.log_likelihood(be, batch, step_rng);
        if (!std::isfinite(ll.value().item())) {
          report.diverged = true;
          report.message = "non-finite batch log-likelihood at epoch " + std::to_string(epoch);
          break;
        }
        const auto grads = tape.backward(ll);
        std::vector<Tensor> g;
        const double scale = -1.0 / static_cast<double>(batch.size());
        for (std::size_t k = 0; k < params.size(); ++k) {
          g.push_back(grads.has(leaves[k]) ? numkit::scale(grads.of(leaves[k]), scale)
                                           : Tensor(params[k]->shape()));
        }
        if (adam_step(params, g, state, adam).clipped) ++log.clipped_steps;
      } catch (const NumericError& e) {
        diverge(e, epoch);
      } catch (const DomainError& e) {
        // A log or exp pushed out of range by the last update.
        diverge(e, epoch);
      }
    }
    if (report.diverged) break;

    try {
      log.train_nll = nll(train_ex);
      log.val_nll = nll(val_ex);
    } catch (const DomainError&) {
      log.train_nll = log.val_nll = std::numeric_limits<double>::quiet_NaN();
    }
    log.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report.log.push_back(log);
    if (log.clipped_steps > 0) {
      say("epoch " + std::to_string(epoch) + ": gradient clipped at norm " + format_double(cfg.clip_norm) +
          " in " + std::to_string(log.clipped_steps) + " steps");
    }
    if (!std::isfinite(log.train_nll) || !std::isfinite(log.val_nll)) {
      report.diverged = true;
      report.message = "non-finite loss after epoch " + std::to_string(epoch);
      break;
    }
    if (selection(log) < report.best_val_nll) {
      report.best_val_nll = selection(log);
      report.best_epoch = epoch;
      best = snapshot(params);
    }
  }
  if (report.diverged) {
    say(report.message + "; keeping the checkpoint of epoch " + std::to_string(report.best_epoch));
  }
  restore(params, best);
  return report;
}

AutoStppModel init_model(const TrainConfig& cfg, const stpp::Rect& domain,
                         std::span<const EventSequence> train) {
  cfg.validate();
  double events = 0.0, span = 0.0;
  for (const auto& s : train) {
    events += static_cast<double>(s.size());
    span += s.T;
  }
  const double mu = std::max(events, 1.0) / (domain.area() * std::max(span, 1e-12));
  Rng rng(cfg.seed, "init");
  AutoStppModel m = AutoStppModel::init(cfg.n_prodnets, cfg.factor_spec(), mu, cfg.window, domain, rng);
  if (cfg.freeze_influence) m.set_influence_enabled(false);
  return m;
}

TrainedModel train_model(const TrainConfig& cfg, const stpp::Rect& domain,
                         std::span<const EventSequence> train, std::span<const EventSequence> val,
                         const MessageSink& sink) {
  const std::vector<double> rates = cfg.lr_grid.empty() ? std::vector<double>{cfg.lr} : cfg.lr_grid;
  std::optional<TrainedModel> best;
  for (double lr : rates) {
    TrainConfig c = cfg;
    c.lr = lr;
    TrainedModel run{init_model(c, domain, train), {}};
    StppObjective obj(run.model);
    run.report = fit(obj, train, val, c, sink);
    if (sink) {
      sink("lr " + format_double(lr) + ": best epoch " + std::to_string(run.report.best_epoch) +
           ", NLL " + format_double(run.report.best_val_nll));
    }
    if (!best || run.report.best_val_nll < best->report.best_val_nll) best = std::move(run);
  }
  return std::move(*best);
}

void write_log_csv(const std::filesystem::path& path, const std::vector<EpochLog>& log) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "epoch,train_nll,val_nll,wall_ms\n";
  for (const auto& e : log) {
    out << e.epoch << ',' << format_double(e.train_nll) << ',' << format_double(e.val_nll) << ','
        << format_double(e.wall_ms) << '\n';
  }
}

}  // namespace autostpp::train
