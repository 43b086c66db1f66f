#include "ratpo/text.hpp"

#include "ratpo/instrument.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace ratpo::text {

std::string format_double(double value)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{})
        throw Error("cannot format number");
    return std::string(buf, end);
}

std::string format_fixed(double value, int decimals)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, decimals);
    if (ec != std::errc{})
        throw Error("cannot format number");
    return std::string(buf, end);
}

double parse_double(std::string_view field, std::string_view what)
{
    field = trim(field);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value))
        throw SchemaError("invalid number '" + std::string(field) + "' for " + std::string(what));
    return value;
}

std::int64_t parse_int(std::string_view field, std::string_view what)
{
    field = trim(field);
    std::int64_t value = 0;
    const char* first = field.data();
    if (!field.empty() && field.front() == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
        throw SchemaError("invalid integer '" + std::string(field) + "' for " + std::string(what));
    return value;
}

std::vector<std::string_view> split(std::string_view line, char delim)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

}  // namespace ratpo::text
