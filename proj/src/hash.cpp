#include "prism/hash.hpp"

#include <openssl/evp.h>

#include "prism/errors.hpp"

namespace prism::hash {

Digest sha256(const void* data, std::size_t len) {
  Digest out{};
  unsigned int out_len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data, len) != 1 ||
      EVP_DigestFinal_ex(ctx, out.data(), &out_len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  return out;
}

Digest sha256(const std::string& s) { return sha256(s.data(), s.size()); }

Digest sha256(const std::vector<std::uint8_t>& bytes) { return sha256(bytes.data(), bytes.size()); }

std::string to_hex(const Digest& d) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (std::uint8_t b : d) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

std::string sha256_hex(const std::string& s) { return to_hex(sha256(s)); }

std::string sha256_hex(const std::vector<std::uint8_t>& bytes) { return to_hex(sha256(bytes)); }

}  // namespace prism::hash
