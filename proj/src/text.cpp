#include "pcopt/text.hpp"

#include "pcopt/error.hpp"

#include <charconv>
#include <cmath>

namespace pcopt::text {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

double parse_double(std::string_view token) {
    if (token == "inf") return HUGE_VAL;
    if (token == "-inf") return -HUGE_VAL;
    double v = 0.0;
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || end != token.data() + token.size()) {
        throw Error(Errc::invalid_input, "not a number: '" + std::string(token) + "'");
    }
    return v;
}

long long parse_int(std::string_view token) {
    long long v = 0;
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || end != token.data() + token.size()) {
        throw Error(Errc::invalid_input, "not an integer: '" + std::string(token) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view line, std::string_view delims) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < line.size()) {
        const auto start = line.find_first_not_of(delims, pos);
        if (start == std::string_view::npos) break;
        const auto stop = line.find_first_of(delims, start);
        out.push_back(line.substr(start, stop == std::string_view::npos ? line.size() - start : stop - start));
        pos = stop == std::string_view::npos ? line.size() : stop;
    }
    return out;
}

}  // namespace pcopt::text
