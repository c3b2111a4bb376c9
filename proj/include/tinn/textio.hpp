#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace tinn {

// Shortest round-trip decimal form, locale-independent.
inline std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }

}  // namespace tinn
