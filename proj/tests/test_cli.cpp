#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "autostpp/evaluate/metrics.hpp"
#include "autostpp/io.hpp"
#include "autostpp/simulate/dataset.hpp"
#include "autostpp/stpp/model.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace autostpp;

namespace {

const fs::path kWork = fs::temp_directory_path() / "autostpp-cli-test";

int run(const std::string& args) {
  const std::string cmd = std::string(AUTOSTPP_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string path(const std::string& name) { return (kWork / name).string(); }

void write(const std::string& name, const std::string& text) { std::ofstream(kWork / name) << text; }

struct Workspace {
  Workspace() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};

}  // namespace

TEST_CASE("version and usage errors") {
  Workspace ws;
  CHECK(run("--version") == 0);
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("simulate --process zz --out " + path("x")) == 1);
  CHECK(run("simulate --process sthp --T -1 --out " + path("x")) == 1);
}

TEST_CASE("simulate is deterministic per seed") {
  Workspace ws;
  REQUIRE(run("simulate --process sthp --dataset ds2 --T 200 --seed 7 --out " + path("a")) == 0);
  REQUIRE(run("simulate --process sthp --dataset ds2 --T 200 --seed 7 --out " + path("b")) == 0);
  REQUIRE(run("simulate --process sthp --dataset ds2 --T 200 --seed 8 --out " + path("c")) == 0);
  CHECK(slurp(kWork / "a" / "events.jsonl") == slurp(kWork / "b" / "events.jsonl"));
  CHECK(slurp(kWork / "a" / "params.json") == slurp(kWork / "b" / "params.json"));
  CHECK(slurp(kWork / "a" / "events.jsonl") != slurp(kWork / "c" / "events.jsonl"));
  const auto data = simulate::load_dataset(kWork / "a");
  CHECK(data.process == "sthp");
  CHECK(data.T == 200.0);
  CHECK(data.sequences.size() == 1);
}

TEST_CASE("train, eval and intensity-grid round trip") {
  Workspace ws;
  REQUIRE(run("simulate --process stsc --dataset ds1 --T 200 --seed 3 --out " + path("d")) == 0);
  write("c0.json", R"({"epochs": 0, "n_windows": 10, "seed": 2})");
  REQUIRE(run("train --data " + path("d") + " --config " + path("c0.json") + " --out " + path("m0.json")) == 0);

  // Only the initial evaluation is logged.
  const std::string log = slurp(kWork / "m0.log.csv");
  CHECK(log.rfind("epoch,train_nll,val_nll,wall_ms\n0,", 0) == 0);
  CHECK(std::count(log.begin(), log.end(), '\n') == 2);

  REQUIRE(run("eval --model " + path("m0.json") + " --data " + path("d") + " --truth " +
              path("d/params.json") + " --windows 10 --grid 21 --times 5 --out " + path("r.json")) == 0);
  const auto report = read_json(kWork / "r.json");
  const auto model = read_json(kWork / "m0.json").get<stpp::AutoStppModel>();
  const auto data = simulate::load_dataset(kWork / "d");
  const auto split = simulate::split_dataset(data.sequences[0], 10, 20.0);
  const auto ll = evaluate::test_ll(model, simulate::sequences(split.test));
  CHECK(report["ll_mean"].get<double>() == doctest::Approx(ll.mean).epsilon(1e-12));
  const double h = report["hellinger_mean"].get<double>();
  CHECK(h >= 0.0);
  CHECK(h <= 1.0);

  REQUIRE(run("intensity-grid --model " + path("m0.json") + " --data " + path("d") +
              " --times 1.5,30 --grid 7 --out " + path("g.csv")) == 0);
  const std::string grid = slurp(kWork / "g.csv");
  CHECK(std::count(grid.begin(), grid.end(), '\n') == 1 + 2 * 7 * 7);

  write("c1.json", R"({"epochs": 1, "n_windows": 10, "seed": 2})");
  CHECK(run("train --model mc --mc-samples 50 --data " + path("d") + " --config " + path("c1.json") + " --out " +
            path("mc.json")) == 0);
  CHECK(read_json(kWork / "mc.json")["kind"] == "mc");
  CHECK(run("intensity-grid --model " + path("mc.json") + " --data " + path("d") + " --times 3 --grid 4 --out " +
            path("gm.csv")) == 0);
}

TEST_CASE("data errors exit with 2") {
  Workspace ws;
  REQUIRE(run("simulate --process stsc --dataset ds1 --T 50 --seed 1 --out " + path("d")) == 0);
  CHECK(run("train --data " + path("missing") + " --out " + path("m.json")) == 2);
  CHECK(run("train --data " + path("d") + " --config " + path("missing.json") + " --out " + path("m.json")) == 2);
  write("bad.json", "{");
  CHECK(run("eval --model " + path("bad.json") + " --data " + path("d") + " --out " + path("r.json")) == 2);
  write("unknown.json", R"({"epochs": 1, "learning_rate": 0.1})");
  CHECK(run("train --data " + path("d") + " --config " + path("unknown.json") + " --out " + path("m.json")) == 2);
  std::ofstream(kWork / "d" / "events.jsonl", std::ios::app) << "{\"seq\": 0, \"t\": \"oops\"}\n";
  CHECK(run("train --data " + path("d") + " --out " + path("m.json")) == 2);
}

TEST_CASE("divergence exits with 3 and still writes the model") {
  Workspace ws;
  REQUIRE(run("simulate --process sthp --dataset ds1 --T 100 --seed 1 --out " + path("d")) == 0);
  write("c.json", R"({"epochs": 3, "lr": 1e6, "clip_norm": 1e12, "n_windows": 10})");
  CHECK(run("train --data " + path("d") + " --config " + path("c.json") + " --out " + path("m.json")) == 3);
  CHECK(fs::exists(kWork / "m.json"));
}

TEST_CASE("fitcheck and bench write CSV tables") {
  Workspace ws;
  REQUIRE(run("fitcheck --n-prodnets 1..2 --baseline constrained-triple --steps 20 --out " + path("fit.csv")) == 0);
  const std::string fit = slurp(kWork / "fit.csv");
  CHECK(fit.rfind("model,n_prodnets,seed,mse\n", 0) == 0);
  CHECK(std::count(fit.begin(), fit.end(), '\n') == 4);
  REQUIRE(run("bench --layers 1 --orders 1,2 --repeats 3 --batch 16 --out " + path("bench.csv")) == 0);
  const std::string bench = slurp(kWork / "bench.csv");
  CHECK(bench.rfind("layers,width,order,kind,impl,median_ms,speedup\n", 0) == 0);
}
