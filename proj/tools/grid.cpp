#include "grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "oqmetro/error.hpp"

namespace oqmetro::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
}

double parse_plain(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw Error(ErrorCode::InvalidConfig, "not a number: '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

}  // namespace

double parse_angle(std::string_view text) {
    std::string_view s = trim(text);
    const auto at = s.find("pi");
    if (at == std::string_view::npos) return parse_plain(s);

    std::string_view coef = trim(s.substr(0, at));
    if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
    double value = std::numbers::pi * (coef.empty() ? 1.0 : coef == "-" ? -1.0 : parse_plain(coef));
    std::string_view rest = trim(s.substr(at + 2));
    if (!rest.empty()) {
        if (rest.front() != '/') throw Error(ErrorCode::InvalidConfig, "bad angle '" + std::string(text) + "'");
        const double den = parse_plain(rest.substr(1));
        if (den == 0.0) throw Error(ErrorCode::InvalidConfig, "division by zero in '" + std::string(text) + "'");
        value /= den;
    }
    return value;
}

std::vector<double> parse_grid(std::string_view text) {
    std::vector<double> out;
    for (std::string_view item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() == 1) {
            out.push_back(parse_angle(parts[0]));
            continue;
        }
        if (parts.size() != 3) throw Error(ErrorCode::InvalidConfig, "range must be start:stop:step");
        const double start = parse_angle(parts[0]);
        const double stop = parse_angle(parts[1]);
        const double step = parse_angle(parts[2]);
        if (!(step > 0.0) || stop < start) throw Error(ErrorCode::InvalidConfig, "range needs step > 0 and stop >= start");
        const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
        for (long long k = 0; k <= count; ++k) out.push_back(std::min(start + static_cast<double>(k) * step, stop));
    }
    if (out.empty()) throw Error(ErrorCode::InvalidConfig, "empty grid");
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace oqmetro::cli
