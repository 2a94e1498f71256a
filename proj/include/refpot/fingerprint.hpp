#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace refpot {

/// FNV-1a 64-bit hash, used to fingerprint configs and derived artifacts.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string to_hex(std::uint64_t value) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

}  // namespace refpot
