// SPDX-License-Identifier: Apache-2.0

#include "icd/core/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "icd/core/error.hpp"

namespace icd::io {

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io_error, fmt::format("cannot open {}", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io_error, fmt::format("cannot write {}", path.string()));
    out << contents;
    if (!out) throw Error(ErrorKind::io_error, fmt::format("write failed for {}", path.string()));
}

nlohmann::json read_json(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse_error, fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io_error, fmt::format("cannot open {}", path.string()));
    std::vector<nlohmann::json> out;
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::parse_error, fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
        }
    }
    return out;
}

std::vector<nlohmann::json> read_json_records(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        try {
            return nlohmann::json::parse(text).get<std::vector<nlohmann::json>>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::parse_error, fmt::format("{}: {}", path.string(), e.what()));
        }
    }
    return read_jsonl(path);
}

} // namespace icd::io
