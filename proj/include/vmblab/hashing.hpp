#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace vmb {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(const void* data, std::size_t size);
Digest sha256(std::string_view text);
std::string to_hex(const Digest& d);

}  // namespace vmb
