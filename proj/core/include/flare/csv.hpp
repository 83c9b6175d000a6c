#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace flare::csv {

using Row = std::vector<std::string>;

/// Parses RFC-4180-style CSV: quoted fields may hold commas, quotes ("" escape)
/// and newlines. Accepts both \n and \r\n line endings. The final newline is
/// optional. Returns all rows including the header.
std::vector<Row> parse(std::string_view text);

std::vector<Row> read_file(const std::string& path);

/// Serializes rows, quoting fields only where required. Always ends with \n.
std::string serialize(const std::vector<Row>& rows);

void write_file(const std::string& path, const std::vector<Row>& rows);

}  // namespace flare::csv
