#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "autostpp/simulate/process.hpp"
#include "autostpp/stpp/events.hpp"

namespace autostpp::simulate {

/// One time window of a long sequence, rebased to [0, length).
struct Window {
  stpp::EventSequence seq;
  std::size_t index = 0;        // window number
  double offset = 0.0;          // start time in the original sequence
  std::size_t first_event = 0;  // index of seq.events[0] in the original sequence
};

struct DatasetSplit {
  std::vector<Window> train, val, test;
};

/// Cut [0, T) into n_windows windows of `window` time units and assign them in
/// time order at 8:1:1 (40/5/5 for 50 windows). DataError unless
/// T == n_windows * window.
DatasetSplit split_dataset(const stpp::EventSequence& seq, std::size_t n_windows = 50,
                           double window = 200.0);

std::vector<stpp::EventSequence> sequences(const std::vector<Window>& windows);

/// A dataset directory: events.jsonl, one event per line
///   {"seq": int, "t": float, "x": float, "y": float}
/// and params.json with the generating process, seed, T and domain.
struct DatasetFile {
  std::string process;  // "sthp", "stsc" or empty for external data
  std::string dataset;
  std::optional<ProcessParams> params;
  std::uint64_t seed = 0;
  double T = 1.0;
  stpp::Rect domain;
  std::vector<stpp::EventSequence> sequences;
};

inline constexpr const char* kEventsFile = "events.jsonl";
inline constexpr const char* kSidecarFile = "params.json";

void save_dataset(const std::filesystem::path& dir, const DatasetFile& data);
/// DataError on missing files, malformed lines or invalid sequences.
DatasetFile load_dataset(const std::filesystem::path& dir);
/// Generating process recorded in a params.json sidecar.
ProcessParams load_truth(const std::filesystem::path& sidecar);

}  // namespace autostpp::simulate
