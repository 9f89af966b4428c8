#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>

namespace cskit {

// FNV-1a 64-bit; used for run-manifest input digests, not for security.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(data);
  return os.str();
}

inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "unreadable";
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a64_hex(buf.str());
}

}  // namespace cskit
