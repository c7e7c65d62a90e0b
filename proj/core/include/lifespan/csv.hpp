#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lifespan {

/// Shortest decimal text that parses back to the same double; "inf",
/// "-inf" and "nan" for non-finite values.
std::string format_double(double v);

/// Writes one row, quoting cells that contain commas, quotes or newlines.
void write_csv_row(std::ostream& os, const std::vector<std::string>& cells);

/// Splits one CSV line (no embedded newlines).
std::vector<std::string> split_csv_line(const std::string& line);

double parse_double(const std::string& text);

}  // namespace lifespan
