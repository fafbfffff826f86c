#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace ergphase {

// Shortest decimal string that parses back to the same double.  Used for all
// numeric output so reruns are byte-stable across platforms.
inline std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string format_u64(std::uint64_t x) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

} // namespace ergphase
