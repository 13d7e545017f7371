// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace icd::io {

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& contents);

nlohmann::json read_json(const std::filesystem::path& path);

/// One JSON value per non-blank line. Parse errors name the line number.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

/// Accepts either a top-level JSON array or JSON lines.
std::vector<nlohmann::json> read_json_records(const std::filesystem::path& path);

} // namespace icd::io
