#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pfs {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Lowercase hex, no separators.
std::string to_hex(ByteView bytes);

/// Accepts upper or lower case; throws Error(malformed_hex) on odd length or a non-hex digit.
Bytes from_hex(std::string_view hex);

}  // namespace pfs
