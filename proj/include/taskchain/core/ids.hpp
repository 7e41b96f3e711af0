#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace taskchain {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// RFC 4122 version-4 layout over 128 caller-supplied bits.
std::string format_uuid_v4(std::uint64_t hi, std::uint64_t lo);

// Stable sequence id for the `ordinal`-th persona of a run seeded with `seed`.
std::string derive_sequence_id(std::uint64_t seed, std::string_view persona_id, std::uint64_t ordinal);

}  // namespace taskchain
