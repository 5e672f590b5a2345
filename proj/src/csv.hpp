#pragma once

// Minimal RFC 4180 reader/writer shared by the loaders and report writers.

#include <string>
#include <string_view>
#include <vector>

namespace pstyle::csv {

using Row = std::vector<std::string>;

/// Parses quoted fields, doubled quotes and CRLF endings. Blank lines are skipped.
/// Throws ParseError on an unterminated quote.
std::vector<Row> parse(std::string_view text);

std::string escape(std::string_view field);

std::string join(const Row& row);

/// Full-string numeric parse; false on trailing garbage or empty input.
bool parse_double(std::string_view text, double& out);

}  // namespace pstyle::csv
