#pragma once
// Locale-independent number formatting. Trace strings and tables must be
// byte-identical across runs and environments, so all float -> text goes
// through std::to_chars ('.' decimal separator regardless of locale).

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

namespace camo::detail {

inline std::string fmt_fixed(double v, int digits) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
    return std::string(buf, res.ptr);
}

// shortest representation that round-trips exactly
inline std::string fmt_shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// locale-independent counterpart of strtod; '.' decimal separator always
inline bool parse_double(std::string_view s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

inline std::string quoted(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    out.append(s);
    out.push_back('"');
    return out;
}

}  // namespace camo::detail
