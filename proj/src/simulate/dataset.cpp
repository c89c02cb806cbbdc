#include "autostpp/simulate/dataset.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "autostpp/errors.hpp"
#include "autostpp/io.hpp"

namespace autostpp::simulate {

using stpp::Event;
using stpp::EventSequence;

DatasetSplit split_dataset(const EventSequence& seq, std::size_t n_windows, double window) {
  if (n_windows == 0 || !(window > 0.0)) throw DataError("split needs n_windows >= 1 and window > 0");
  const double expected = static_cast<double>(n_windows) * window;
  if (std::abs(expected - seq.T) > 1e-9 * seq.T) {
    throw DataError("horizon mismatch: T = " + format_double(seq.T) + " but " +
                    std::to_string(n_windows) + " windows of " + format_double(window) + " cover " +
                    format_double(expected));
  }
  std::vector<Window> windows(n_windows);
  for (std::size_t w = 0; w < n_windows; ++w) {
    windows[w].index = w;
    windows[w].offset = static_cast<double>(w) * window;
    windows[w].seq.domain = seq.domain;
    windows[w].seq.T = window;
  }
  for (std::size_t i = 0; i < seq.events.size(); ++i) {
    const Event& e = seq.events[i];
    auto w = static_cast<std::size_t>(std::floor(e.t / window));
    w = std::min(w, n_windows - 1);
    while (w > 0 && e.t < windows[w].offset) --w;
    while (w + 1 < n_windows && e.t >= windows[w + 1].offset) ++w;
    Window& win = windows[w];
    if (win.seq.events.empty()) win.first_event = i;
    // Rounding may put t - offset on the right edge; keep it inside [0, window).
    const double local = std::min(e.t - win.offset, std::nextafter(window, 0.0));
    win.seq.events.push_back(Event{e.x, e.y, std::max(local, 0.0)});
  }
  // Empty windows point at the first event after them.
  for (std::size_t w = n_windows; w-- > 0;) {
    if (windows[w].seq.events.empty()) {
      windows[w].first_event = w + 1 < n_windows ? windows[w + 1].first_event : seq.events.size();
    }
  }

  const std::size_t n_val = n_windows / 10;
  const std::size_t n_test = n_windows / 10;
  const std::size_t n_train = n_windows - n_val - n_test;
  DatasetSplit split;
  for (std::size_t w = 0; w < n_windows; ++w) {
    auto& dst = w < n_train ? split.train : w < n_train + n_val ? split.val : split.test;
    dst.push_back(std::move(windows[w]));
  }
  return split;
}

std::vector<EventSequence> sequences(const std::vector<Window>& windows) {
  std::vector<EventSequence> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(w.seq);
  return out;
}

void save_dataset(const std::filesystem::path& dir, const DatasetFile& data) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / kEventsFile);
    if (!out) throw DataError("cannot write " + (dir / kEventsFile).string());
    for (std::size_t s = 0; s < data.sequences.size(); ++s) {
      for (const auto& e : data.sequences[s].events) {
        out << "{\"seq\":" << s << ",\"t\":" << format_double(e.t) << ",\"x\":" << format_double(e.x)
            << ",\"y\":" << format_double(e.y) << "}\n";
      }
    }
  }
  nlohmann::json side{{"process", data.process},
                      {"dataset", data.dataset},
                      {"seed", data.seed},
                      {"T", data.T},
                      {"domain", data.domain},
                      {"n_sequences", data.sequences.size()}};
  if (data.params) side["params"] = *data.params;
  write_json(dir / kSidecarFile, side);
}

DatasetFile load_dataset(const std::filesystem::path& dir) {
  const nlohmann::json side = read_json(dir / kSidecarFile);
  DatasetFile data;
  try {
    data.process = side.value("process", std::string());
    data.dataset = side.value("dataset", std::string());
    data.seed = side.value("seed", std::uint64_t{0});
    data.T = side.at("T").get<double>();
    data.domain = side.at("domain").get<stpp::Rect>();
    if (side.contains("params")) data.params = side.at("params").get<ProcessParams>();
    const auto n = side.value("n_sequences", std::size_t{1});
    data.sequences.assign(n, EventSequence{{}, data.domain, data.T});
  } catch (const nlohmann::json::exception& e) {
    throw DataError((dir / kSidecarFile).string() + ": " + e.what());
  }

  const auto path = dir / kEventsFile;
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto s = j.at("seq").get<std::size_t>();
      if (s >= data.sequences.size()) data.sequences.resize(s + 1, EventSequence{{}, data.domain, data.T});
      data.sequences[s].events.push_back(
          Event{j.at("x").get<double>(), j.at("y").get<double>(), j.at("t").get<double>()});
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  for (std::size_t s = 0; s < data.sequences.size(); ++s) {
    try {
      data.sequences[s].validate();
    } catch (const DataError& e) {
      throw DataError(path.string() + ": sequence " + std::to_string(s) + ": " + e.what());
    }
  }
  return data;
}

ProcessParams load_truth(const std::filesystem::path& sidecar) {
  const nlohmann::json side = read_json(sidecar);
  if (!side.contains("params")) throw DataError(sidecar.string() + " names no generating process");
  return side.at("params").get<ProcessParams>();
}

}  // namespace autostpp::simulate
