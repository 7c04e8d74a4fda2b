#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace cogtrace {

// FNV-1a 64-bit. Stable across platforms; used for manifests and replay keys.
// Not cryptographic.
uint64_t fnv1a_64(std::string_view data);
std::string fnv1a_64_hex(std::string_view data);
std::string hash_file(const std::filesystem::path& path);  // "fnv1a64:<hex>"

// Number of Unicode code points in a UTF-8 string. Span offsets are character
// positions, not bytes.
int64_t utf8_length(std::string_view text);

// Fixed-point formatting used by every serialized number so outputs are
// byte-identical across runs.
std::string format_fixed(double value, int decimals);

std::string read_file(const std::filesystem::path& path);  // throws Error
void write_file(const std::filesystem::path& path, std::string_view content);

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results land at their
// index, so aggregation order is deterministic regardless of thread count.
void parallel_for_index(size_t n, int jobs, const std::function<void(size_t)>& fn);

}  // namespace cogtrace
