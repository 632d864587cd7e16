#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace webagent {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Lowercases and collapses every run of whitespace to a single space, trimming
/// both ends. Used for the case-insensitive substring rules of the evaluators.
std::string normalize_for_match(std::string_view s);

std::vector<std::string> split(std::string_view s, std::string_view delimiter);
std::string join(const std::vector<std::string>& parts, std::string_view delimiter);
std::string replace_all(std::string s, std::string_view from, std::string_view to);

std::string sha256_hex(std::string_view data);
std::string sha256_hex(std::span<const std::uint8_t> data);

std::string base64_encode(std::span<const std::uint8_t> data);
std::string base64_encode(std::string_view data);
std::vector<std::uint8_t> base64_decode(std::string_view text);

std::string read_file(const std::string& path);
std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// Formats a ratio as a percentage with two decimals, e.g. 0.16373 -> "16.37%".
std::string format_percent(double ratio);

}  // namespace webagent
