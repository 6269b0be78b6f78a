#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lobmm {

// Reads a whole file; throws std::runtime_error if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Writes via a temporary file in the same directory followed by an atomic
// rename, so a crash never leaves a half-written output behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Shortest decimal representation that round-trips to the same double.
std::string fmt_double(double v);

std::vector<std::string> split(std::string_view text, char sep);

}  // namespace lobmm
