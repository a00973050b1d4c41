#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace oqmetro::cli {

/// Parses a scalar such as "0.25", "pi", "pi/6", "7pi/10" or "0.5*pi".
double parse_angle(std::string_view text);

/// Comma-separated list whose items are scalars or inclusive ranges
/// "start:stop:step". Throws InvalidConfig on malformed input or step <= 0.
std::vector<double> parse_grid(std::string_view text);

/// Fixed-format number for CSV/JSON cells; "inf" for +∞, empty for NaN.
std::string format_number(double v);

}  // namespace oqmetro::cli
