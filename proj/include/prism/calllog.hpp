#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>

namespace prism {

// Thread-safe tally of backend traffic. Each entry folds the request and
// response hashes into a rolling digest so run manifests can record what a
// stage sent without storing payloads.
class CallLog {
 public:
  void record(const std::string& purpose, const std::string& request_hash,
              const std::string& response_hash);

  std::map<std::string, std::uint64_t> counts() const;
  std::uint64_t count(const std::string& purpose) const;
  std::string digest() const;
  void reset();

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::uint64_t> counts_;
  std::string digest_;
};

}  // namespace prism
