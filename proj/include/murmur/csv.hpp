#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace murmur::csv {

/// Shortest decimal form that reads back to the same double.
std::string num(double v);

/// Reads a numeric CSV whose first non-comment line must equal `header`.
/// Empty fields become std::nullopt. Throws ParseError.
std::vector<std::vector<std::optional<double>>> read_table(std::istream& in,
                                                           const std::vector<std::string>& header);

}  // namespace murmur::csv
