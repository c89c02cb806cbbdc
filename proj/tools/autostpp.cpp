// autostpp: simulate, train, evaluate and benchmark spatiotemporal point
// process models from the command line.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 numeric failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "autostpp/baselines/mc.hpp"
#include "autostpp/bench/bench.hpp"
#include "autostpp/errors.hpp"
#include "autostpp/evaluate/metrics.hpp"
#include "autostpp/io.hpp"
#include "autostpp/simulate/dataset.hpp"
#include "autostpp/simulate/process.hpp"
#include "autostpp/train/config.hpp"
#include "autostpp/train/fit.hpp"
#include "autostpp/train/fitcheck.hpp"

namespace fs = std::filesystem;
using namespace autostpp;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

void log(const std::string& msg) { std::cerr << "autostpp: " << msg << '\n'; }

struct Splits {
  simulate::DatasetFile data;
  std::vector<simulate::Window> train, val, test;
  // The sequence the windows were cut from, or empty for multi-sequence data.
  std::optional<stpp::EventSequence> full;
};

// One long sequence is cut into n_windows time windows (8:1:1); data that
// already holds several sequences is split 8:1:1 in file order.
Splits load_splits(const fs::path& dir, std::size_t n_windows) {
  Splits s;
  s.data = simulate::load_dataset(dir);
  auto& seqs = s.data.sequences;
  if (seqs.size() == 1) {
    s.full = seqs.front();
    auto split = simulate::split_dataset(seqs.front(), n_windows, seqs.front().T / static_cast<double>(n_windows));
    s.train = std::move(split.train);
    s.val = std::move(split.val);
    s.test = std::move(split.test);
    return s;
  }
  const std::size_t n_val = seqs.size() / 10, n_test = seqs.size() / 10;
  const std::size_t n_train = seqs.size() - n_val - n_test;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    simulate::Window w{seqs[i], i, 0.0, 0};
    (i < n_train ? s.train : i < n_train + n_val ? s.val : s.test).push_back(std::move(w));
  }
  return s;
}

using AnyModel = std::variant<stpp::AutoStppModel, baselines::McStppModel>;

AnyModel load_model(const fs::path& path) {
  const auto j = read_json(path);
  try {
    if (j.value("kind", std::string("autostpp")) == "mc") return j.get<baselines::McStppModel>();
    return j.get<stpp::AutoStppModel>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw CLI::ValidationError("list", "'" + item + "' is not a number");
    }
  }
  return out;
}

// "1..10" or "2,5,10".
std::vector<std::size_t> parse_range(const std::string& text) {
  std::vector<std::size_t> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto lo = std::stoul(text.substr(0, dots)), hi = std::stoul(text.substr(dots + 2));
    if (lo == 0 || hi < lo) throw CLI::ValidationError("--n-prodnets", "expected a range like 1..10");
    for (auto n = lo; n <= hi; ++n) out.push_back(n);
    return out;
  }
  for (double v : parse_list(text)) out.push_back(static_cast<std::size_t>(v));
  return out;
}

int cmd_simulate(const std::string& process, const std::string& dataset, double T, std::uint64_t seed,
                 const fs::path& out) {
  const auto params = simulate::preset(process, dataset);
  simulate::DatasetFile data;
  data.process = process;
  data.dataset = dataset;
  data.params = params;
  data.seed = seed;
  data.T = T;
  auto seq = simulate::simulate(params, T, seed);
  data.domain = seq.domain;
  data.sequences.push_back(std::move(seq));
  simulate::save_dataset(out, data);
  log("wrote " + std::to_string(data.sequences.front().size()) + " events to " + out.string());
  return kOk;
}

int cmd_train(const fs::path& data_dir, const std::string& config, const fs::path& out, fs::path log_path,
              const std::string& kind, std::size_t mc_samples) {
  const auto cfg = train::load_config(config);
  const auto splits = load_splits(data_dir, cfg.n_windows);
  const auto train_seqs = simulate::sequences(splits.train), val_seqs = simulate::sequences(splits.val);
  if (log_path.empty()) log_path = fs::path(out).replace_extension(".log.csv");

  train::FitReport report;
  nlohmann::json model;
  if (kind == "mc") {
    auto run = baselines::train_mc_model(cfg, baselines::McConfig{mc_samples, cfg.seed}, splits.data.domain,
                                         train_seqs, val_seqs, log);
    report = std::move(run.report);
    model = run.model;
  } else {
    auto run = train::train_model(cfg, splits.data.domain, train_seqs, val_seqs, log);
    report = std::move(run.report);
    model = run.model;
  }
  write_json(out, model);
  train::write_log_csv(log_path, report.log);
  log("best epoch " + std::to_string(report.best_epoch) + " (lr " + format_double(report.lr) + ", val NLL " +
      format_double(report.best_val_nll) + "); wrote " + out.string() + " and " + log_path.string());
  if (report.diverged) {
    log("training diverged: " + report.message);
    return kNumeric;
  }
  return kOk;
}

int cmd_eval(const fs::path& model_path, const fs::path& data_dir, const fs::path& truth_path, std::size_t grid_k,
             std::size_t n_windows, std::size_t n_times, std::size_t mc_samples, const fs::path& out) {
  const AnyModel model = load_model(model_path);
  const auto splits = load_splits(data_dir, n_windows);
  const auto test = simulate::sequences(splits.test);

  evaluate::DatasetReport rep;
  rep.name = splits.data.process.empty() ? data_dir.filename().string() : splits.data.process + "/" + splits.data.dataset;
  evaluate::GridIntensity fn;
  if (const auto* m = std::get_if<stpp::AutoStppModel>(&model)) {
    rep.ll = evaluate::test_ll(*m, test);
    fn = evaluate::model_intensity(*m);
  } else {
    const auto& mc = std::get<baselines::McStppModel>(model);
    rep.ll = baselines::test_ll(mc, test, baselines::McConfig{mc_samples});
    fn = baselines::model_intensity(mc);
  }
  if (!truth_path.empty()) {
    const auto truth = evaluate::truth_intensity(simulate::load_truth(truth_path));
    const stpp::Grid grid{splits.data.domain, grid_k};
    if (splits.full) {
      rep.hellinger = evaluate::time_avg_hellinger(fn, truth, *splits.full, splits.test, grid, n_times);
    } else {
      double total = 0.0;
      for (const auto& w : splits.test) {
        total += evaluate::time_avg_hellinger(fn, truth, w.seq, std::span(&w, 1), grid, n_times);
      }
      rep.hellinger = total / static_cast<double>(splits.test.size());
    }
  }
  auto report = evaluate::report_json(std::vector<evaluate::DatasetReport>{rep});
  if (std::holds_alternative<baselines::McStppModel>(model)) report["ll_estimated"] = true;
  write_json(out, report);
  std::cout << report.dump(2) << '\n';
  return kOk;
}

int cmd_bench(const bench::BenchConfig& cfg, const fs::path& out) {
  const auto rows = bench::run_bench(cfg, log);
  bench::write_bench_csv(out, rows);
  for (const auto& r : rows) {
    if (r.impl == "dp") {
      std::printf("layers %zu  order %d  %-10s  dp %8.3f ms  speedup %.2fx\n", r.layers, r.order, r.kind.c_str(),
                  r.median_ms, r.speedup);
    }
  }
  return kOk;
}

int cmd_fitcheck(const std::vector<std::size_t>& ns, const std::string& baseline, const train::FitcheckConfig& base,
                 std::size_t seeds, const fs::path& out) {
  if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
  std::ofstream csv(out);
  if (!csv) throw DataError("cannot write " + out.string());
  csv << "model,n_prodnets,seed,mse\n";
  auto row = [&](const std::string& model, std::size_t n, std::uint64_t seed, double mse) {
    csv << model << ',' << n << ',' << seed << ',' << format_double(mse) << '\n';
    std::printf("%-20s N=%-3zu seed %llu  mse %.6g\n", model.c_str(), n, static_cast<unsigned long long>(seed), mse);
    std::fflush(stdout);
  };
  for (std::uint64_t s = 0; s < seeds; ++s) {
    train::FitcheckConfig cfg = base;
    cfg.seed = base.seed + s;
    for (std::size_t n : ns) row("prodnet", n, cfg.seed, train::fitcheck_prodsum(n, cfg).mse);
    if (baseline == "constrained-triple") row("constrained-triple", 0, cfg.seed, train::fitcheck_constrained_triple(cfg).mse);
  }
  return kOk;
}

int cmd_intensity_grid(const fs::path& model_path, const fs::path& data_dir, const std::vector<double>& times,
                       std::size_t grid_k, std::size_t sequence, const fs::path& out) {
  const AnyModel model = load_model(model_path);
  const auto data = simulate::load_dataset(data_dir);
  if (sequence >= data.sequences.size()) {
    throw DataError("sequence " + std::to_string(sequence) + " not in " + data_dir.string() + " (" +
                    std::to_string(data.sequences.size()) + " sequences)");
  }
  const auto& events = data.sequences[sequence].events;
  const stpp::Grid grid{data.domain, grid_k};
  const auto xs = grid.xs(), ys = grid.ys();
  if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
  std::ofstream csv(out);
  if (!csv) throw DataError("cannot write " + out.string());
  csv << "t,x,y,lambda\n";
  for (double t : times) {
    const auto vals = std::visit([&](const auto& m) {
      if constexpr (std::is_same_v<std::decay_t<decltype(m)>, stpp::AutoStppModel>) {
        return stpp::intensity_grid(m, t, events, grid);
      } else {
        return m.intensity_grid(t, events, grid);
      }
    }, model);
    for (std::size_t i = 0; i < grid_k; ++i) {
      for (std::size_t j = 0; j < grid_k; ++j) {
        csv << format_double(t) << ',' << format_double(xs[i]) << ',' << format_double(ys[j]) << ','
            << format_double(vals[i * grid_k + j]) << '\n';
      }
    }
  }
  log("wrote " + std::to_string(times.size() * grid.size()) + " grid values to " + out.string());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatiotemporal point processes with closed-form likelihoods"};
  app.set_version_flag("--version", std::string("autostpp ") + kVersion + "\nmodel format " +
                                        std::to_string(stpp::kModelFormatVersion) + "\ndataset format 1");
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate a preset process to events.jsonl + params.json");
  std::string process, dataset = "ds1";
  double T = 10000.0;
  std::uint64_t seed = 0;
  fs::path sim_out;
  sim->add_option("--process", process, "sthp or stsc")->required()->check(CLI::IsMember({"sthp", "stsc"}));
  sim->add_option("--dataset", dataset, "ds1, ds2 or ds3")->check(CLI::IsMember({"ds1", "ds2", "ds3"}));
  sim->add_option("--T", T, "Horizon")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "Random seed");
  sim->add_option("--out", sim_out, "Output directory")->required();

  // train
  auto* tr = app.add_subcommand("train", "Fit a model by maximum likelihood");
  fs::path tr_data, tr_out, tr_log;
  std::string tr_config, tr_kind = "autostpp";
  std::size_t mc_samples = 1000;
  tr->add_option("--data", tr_data, "Dataset directory")->required();
  tr->add_option("--config", tr_config, "Training config JSON");
  tr->add_option("--out", tr_out, "Model JSON")->required();
  tr->add_option("--log", tr_log, "Training log CSV (default: <out>.log.csv)");
  tr->add_option("--model", tr_kind, "autostpp or mc")->check(CLI::IsMember({"autostpp", "mc"}));
  tr->add_option("--mc-samples", mc_samples, "Monte Carlo samples per integral")->check(CLI::PositiveNumber);

  // eval
  auto* ev = app.add_subcommand("eval", "Test log-likelihood and time-averaged Hellinger distance");
  fs::path ev_model, ev_data, ev_truth, ev_out;
  std::size_t grid_k = 101, n_windows = 50, n_times = 50, ev_mc = 10000;
  ev->add_option("--model", ev_model, "Model JSON")->required();
  ev->add_option("--data", ev_data, "Dataset directory")->required();
  ev->add_option("--truth", ev_truth, "params.json of the generating process");
  ev->add_option("--grid", grid_k, "Grid points per axis")->check(CLI::Range(2, 1001));
  ev->add_option("--windows", n_windows, "Windows cut from a single sequence")->check(CLI::PositiveNumber);
  ev->add_option("--times", n_times, "Time samples per test window")->check(CLI::PositiveNumber);
  ev->add_option("--mc-samples", ev_mc, "Monte Carlo samples per integral (mc models)")->check(CLI::PositiveNumber);
  ev->add_option("--out", ev_out, "Report JSON")->required();

  // bench
  auto* be = app.add_subcommand("bench", "Time dnforward against naive nested differentiation");
  bench::BenchConfig bcfg;
  fs::path be_out;
  be->add_option("--layers", bcfg.layers, "Hidden layer counts")->delimiter(',');
  be->add_option("--orders", bcfg.orders, "Derivative orders")->delimiter(',');
  be->add_option("--widths", bcfg.widths, "Hidden widths")->delimiter(',');
  be->add_option("--repeats", bcfg.repeats, "Timed repeats")->check(CLI::PositiveNumber);
  be->add_option("--batch", bcfg.batch, "Input rows")->check(CLI::PositiveNumber);
  be->add_option("--out", be_out, "CSV output")->required();

  // fitcheck
  auto* fc = app.add_subcommand("fitcheck", "Fit positive networks to sin(x)cos(y)sin(z)+1");
  std::string fc_range = "1..10", fc_baseline = "none";
  train::FitcheckConfig fcfg;
  std::size_t fc_seeds = 1;
  fs::path fc_out;
  fc->add_option("--n-prodnets", fc_range, "Range a..b or list of ProdNet counts");
  fc->add_option("--baseline", fc_baseline, "constrained-triple or none")
      ->check(CLI::IsMember({"constrained-triple", "none"}));
  fc->add_option("--steps", fcfg.steps, "Adam steps")->check(CLI::PositiveNumber);
  fc->add_option("--lr", fcfg.lr, "Learning rate")->check(CLI::PositiveNumber);
  fc->add_option("--seed", fcfg.seed, "First seed");
  fc->add_option("--seeds", fc_seeds, "Number of seeds")->check(CLI::PositiveNumber);
  fc->add_option("--out", fc_out, "CSV output")->required();

  // intensity-grid
  auto* ig = app.add_subcommand("intensity-grid", "Export lambda(s, t) on the evaluation grid");
  fs::path ig_model, ig_data, ig_out;
  std::string ig_times;
  std::size_t ig_grid = 101, ig_seq = 0;
  ig->add_option("--model", ig_model, "Model JSON")->required();
  ig->add_option("--data", ig_data, "Dataset directory")->required();
  ig->add_option("--times", ig_times, "Comma-separated times")->required();
  ig->add_option("--grid", ig_grid, "Grid points per axis")->check(CLI::Range(2, 1001));
  ig->add_option("--sequence", ig_seq, "Sequence index in the dataset");
  ig->add_option("--out", ig_out, "CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return cmd_simulate(process, dataset, T, seed, sim_out);
    if (*tr) return cmd_train(tr_data, tr_config, tr_out, tr_log, tr_kind, mc_samples);
    if (*ev) return cmd_eval(ev_model, ev_data, ev_truth, grid_k, n_windows, n_times, ev_mc, ev_out);
    if (*be) return cmd_bench(bcfg, be_out);
    if (*fc) return cmd_fitcheck(parse_range(fc_range), fc_baseline, fcfg, fc_seeds, fc_out);
    if (*ig) return cmd_intensity_grid(ig_model, ig_data, parse_list(ig_times), ig_grid, ig_seq, ig_out);
  } catch (const CLI::ValidationError& e) {
    log(e.what());
    return kUsage;
  } catch (const DataError& e) {
    log(std::string("data error: ") + e.what());
    return kData;
  } catch (const ShapeError& e) {
    log(std::string("data error: ") + e.what());
    return kData;
  } catch (const nlohmann::json::exception& e) {
    log(std::string("data error: ") + e.what());
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    log(std::string("data error: ") + e.what());
    return kData;
  } catch (const NumericError& e) {
    log(std::string("numeric failure: ") + e.what());
    return kNumeric;
  } catch (const DomainError& e) {
    log(std::string("invalid argument: ") + e.what());
    return kUsage;
  }
  return kUsage;
}
