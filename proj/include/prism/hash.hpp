#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace prism::hash {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(const void* data, std::size_t len);
Digest sha256(const std::string& s);
Digest sha256(const std::vector<std::uint8_t>& bytes);

std::string to_hex(const Digest& d);
std::string sha256_hex(const std::string& s);
std::string sha256_hex(const std::vector<std::uint8_t>& bytes);

}  // namespace prism::hash
