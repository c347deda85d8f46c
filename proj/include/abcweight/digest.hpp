#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace abcweight {

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value);

// FNV-1a over a file's bytes, as a 16-digit hex string.
std::string file_digest(const std::filesystem::path& path);

}  // namespace abcweight
