#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace groundbench {

/// Hex-encoded SHA-256 of the input.
std::string sha256_hex(std::string_view data);

/// First 8 bytes of SHA-256 as a u64, for seeding deterministic draws.
std::uint64_t sha256_prefix64(std::string_view data);

}  // namespace groundbench
