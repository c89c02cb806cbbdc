#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

namespace autostpp {

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

// DataError on unreadable files or invalid JSON.
nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace autostpp
