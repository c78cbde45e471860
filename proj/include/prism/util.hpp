#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace prism::util {

// Shortest round-trip decimal form of a double, locale independent.
std::string fmt_double(double v);

std::string to_lower(std::string s);
std::string trim(const std::string& s);

// Whole-file helpers. read_file throws IoError if the path is unreadable.
std::string read_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

// Write-temp-then-rename so readers never observe a partial file.
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);

std::string base64_encode(const std::uint8_t* data, std::size_t len);

// Runs fn(i) for i in [0, n) on up to max_inflight threads. Exceptions are
// rethrown on the calling thread after all workers join. Results must be
// written by fn into caller-owned, index-addressed storage.
void parallel_for(std::size_t n, int max_inflight, const std::function<void(std::size_t)>& fn);

// Monotonic seconds; returns 0.0 when the PRISM_CLOCK=fixed env override is
// set so golden-run artifacts stay byte-identical.
double wall_seconds();

}  // namespace prism::util
