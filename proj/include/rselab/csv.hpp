#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rselab::csv {

/// Shortest round-trip decimal form.
std::string format(double v);

std::vector<std::string> split_line(const std::string& line);

/// Numeric rows of a CSV file. A first row that does not parse as numbers is
/// treated as a header and returned through `header`.
std::vector<std::vector<double>> read_numeric(std::istream& is, std::vector<std::string>* header = nullptr);

}  // namespace rselab::csv
