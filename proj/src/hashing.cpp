#include "vmblab/hashing.hpp"

#include <openssl/sha.h>

namespace vmb {

Digest sha256(const void* data, std::size_t size) {
  Digest d{};
  SHA256(static_cast<const unsigned char*>(data), size, d.data());
  return d;
}

Digest sha256(std::string_view text) { return sha256(text.data(), text.size()); }

std::string to_hex(const Digest& d) {
  static const char* hex = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (auto b : d) {
    s.push_back(hex[b >> 4]);
    s.push_back(hex[b & 15]);
  }
  return s;
}

}  // namespace vmb
