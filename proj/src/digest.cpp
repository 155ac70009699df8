#include "btcpanel/digest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "btcpanel/errors.hpp"

namespace btcpanel {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string digest_hex(std::string_view data) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file for digest: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return digest_hex(ss.str());
}

}  // namespace btcpanel
