#include "flare/csv.hpp"

#include "flare/util.hpp"

#include <stdexcept>

namespace flare::csv {

std::vector<Row> parse(std::string_view text) {
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool in_quotes = false;
    bool row_has_data = false;

    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                } else {
                    in_quotes = false;
                    ++i;
                }
            } else {
                field.push_back(c);
                ++i;
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                row_has_data = true;
                ++i;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                row_has_data = true;
                ++i;
                break;
            case '\r':
                ++i;
                break;
            case '\n':
                if (row_has_data || !field.empty() || !row.empty()) {
                    row.push_back(std::move(field));
                    field.clear();
                    rows.push_back(std::move(row));
                    row.clear();
                }
                row_has_data = false;
                ++i;
                break;
            default:
                field.push_back(c);
                row_has_data = true;
                ++i;
                break;
        }
    }
    if (in_quotes) throw std::runtime_error("unterminated quoted field");
    if (row_has_data || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<Row> read_file(const std::string& path) {
    return parse(util::read_file(path));
}

namespace {

bool needs_quoting(const std::string& field) {
    return field.find_first_of(",\"\r\n") != std::string::npos;
}

void append_field(std::string& out, const std::string& field) {
    if (!needs_quoting(field)) {
        out += field;
        return;
    }
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

}  // namespace

std::string serialize(const std::vector<Row>& rows) {
    std::string out;
    for (const Row& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out.push_back(',');
            append_field(out, row[i]);
        }
        out.push_back('\n');
    }
    return out;
}

void write_file(const std::string& path, const std::vector<Row>& rows) {
    util::write_file(path, serialize(rows));
}

}  // namespace flare::csv
