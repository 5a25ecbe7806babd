#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mtmc::io {

/// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

/// Parses a whole string as a double; throws mtmc::Error otherwise.
double parse_double(std::string_view text);

/// RFC-4180 field: quoted when it contains a comma, quote or line break.
std::string csv_field(std::string_view text);

/// Splits one RFC-4180 record (no embedded line breaks).
std::vector<std::string> split_csv_record(std::string_view line);

} // namespace mtmc::io
