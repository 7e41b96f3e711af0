#include "taskchain/core/ids.hpp"

#include <array>

namespace taskchain {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) noexcept {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string format_uuid_v4(std::uint64_t hi, std::uint64_t lo) {
    hi = (hi & 0xffffffffffff0fffULL) | 0x0000000000004000ULL;
    lo = (lo & 0x3fffffffffffffffULL) | 0x8000000000000000ULL;
    std::array<unsigned char, 16> b{};
    for (int i = 0; i < 8; ++i) {
        b[i] = static_cast<unsigned char>(hi >> (56 - 8 * i));
        b[8 + i] = static_cast<unsigned char>(lo >> (56 - 8 * i));
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(36);
    for (int i = 0; i < 16; ++i) {
        if (i == 4 || i == 6 || i == 8 || i == 10) out += '-';
        out += kHex[b[i] >> 4];
        out += kHex[b[i] & 0xf];
    }
    return out;
}

std::string derive_sequence_id(std::uint64_t seed, std::string_view persona_id, std::uint64_t ordinal) {
    std::uint64_t h = fnv1a64(persona_id, splitmix64(seed));
    std::uint64_t hi = splitmix64(h ^ splitmix64(ordinal));
    std::uint64_t lo = splitmix64(hi ^ 0x5bd1e9955bd1e995ULL);
    return format_uuid_v4(hi, lo);
}

}  // namespace taskchain
