#pragma once

#include <string>
#include <vector>

namespace ethfraud {

// The project's file formats never quote fields, so a plain split is enough.
std::vector<std::string> split_csv_line(const std::string& line);

// Reads a whole CSV file. The header must match `expected_header` exactly;
// parse errors name the 1-based line number. Blank trailing lines are ignored.
std::vector<std::vector<std::string>> read_csv_rows(const std::string& path,
                                                    const std::string& expected_header);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

// Fixed-point with `decimals` digits, e.g. for report tables.
std::string format_fixed(double v, int decimals);

}  // namespace ethfraud
