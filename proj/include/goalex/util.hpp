#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace goalex {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// ASCII case-insensitive equality, used wherever name uniqueness is defined.
bool iequals(std::string_view a, std::string_view b);

// FNV-1a 64-bit over raw bytes; seed allows chaining.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string to_hex(std::uint64_t value);

// Current UTC instant as "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string utc_timestamp_now();

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

void log_warn(const std::string& message);

// Formats a score with up to one decimal, trailing ".0" stripped (8.5 -> "8.5", 3 -> "3").
std::string format_score(double score);

}  // namespace goalex
