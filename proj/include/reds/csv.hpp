#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reds {

/// Comma-separated table with a header row. Fields are not quoted.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  ///< 1-based source line of each row

    std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::string_view text, const std::string& source = "<memory>");

/// Shortest text that parses back to exactly `value`.
std::string format_double(double value);

/// Parses a full field as a double; std::nullopt on empty or malformed text.
std::optional<double> parse_double(std::string_view text);

/// Writes `contents` to `path`, throwing InputError when the file cannot be written.
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace reds
