#include "prism/calllog.hpp"

#include <cctype>

#include "prism/hash.hpp"

namespace prism {

void CallLog::record(const std::string& purpose, const std::string& request_hash,
                     const std::string& response_hash) {
  std::lock_guard<std::mutex> lock(mutex_);
  ++counts_[purpose];
  // Fold order-independently (sum of per-call hashes would need bignums;
  // XOR of digest words is enough for a fingerprint and keeps concurrent
  // completion order from changing the result).
  std::string entry = purpose + ":" + request_hash + ":" + response_hash;
  auto d = hash::sha256(entry);
  if (digest_.size() != 64) digest_.assign(64, '0');
  std::string hex = hash::to_hex(d);
  for (std::size_t i = 0; i < 64; ++i) {
    int a = std::isdigit(static_cast<unsigned char>(digest_[i])) ? digest_[i] - '0'
                                                                 : digest_[i] - 'a' + 10;
    int b = std::isdigit(static_cast<unsigned char>(hex[i])) ? hex[i] - '0' : hex[i] - 'a' + 10;
    int x = a ^ b;
    digest_[i] = static_cast<char>(x < 10 ? '0' + x : 'a' + x - 10);
  }
}

std::map<std::string, std::uint64_t> CallLog::counts() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return counts_;
}

std::uint64_t CallLog::count(const std::string& purpose) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = counts_.find(purpose);
  return it == counts_.end() ? 0 : it->second;
}

std::string CallLog::digest() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return digest_.empty() ? std::string(64, '0') : digest_;
}

void CallLog::reset() {
  std::lock_guard<std::mutex> lock(mutex_);
  counts_.clear();
  digest_.clear();
}

}  // namespace prism
