#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ratpo::text {

/// Shortest representation that round-trips to the same double.
std::string format_double(double value);
std::string format_fixed(double value, int decimals);

double parse_double(std::string_view field, std::string_view what);
std::int64_t parse_int(std::string_view field, std::string_view what);

std::vector<std::string_view> split(std::string_view line, char delim);
std::string_view trim(std::string_view s);

}  // namespace ratpo::text
