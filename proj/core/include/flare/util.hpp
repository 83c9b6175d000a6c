#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flare::util {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Splits text into lowercase alphanumeric tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Parses an integer; empty or malformed input yields nullopt.
std::optional<long> parse_long(std::string_view s);
std::optional<double> parse_double(std::string_view s);

/// FNV-1a over the bytes of `data`.
std::uint64_t fnv1a(std::string_view data);

/// FNV-1a rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

/// splitmix64 step; the workhorse behind the deterministic embedder.
std::uint64_t splitmix64(std::uint64_t& state);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
bool file_exists(const std::string& path);

/// Fixed-point decimal with `digits` places, round half away from zero.
std::string format_fixed(double value, int digits);

}  // namespace flare::util
