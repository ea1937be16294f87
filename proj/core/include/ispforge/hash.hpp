#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ispforge {

/// FNV-1a 64-bit, used to fingerprint registry manifests and extractor
/// configs inside checkpoints.
constexpr std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : text) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h);

} // namespace ispforge
