#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace btcpanel {

// FNV-1a 64-bit content digest, hex-encoded; used for manifest entries and
// rerun identity checks.
std::uint64_t fnv1a64(std::string_view data);
std::string digest_hex(std::string_view data);
std::string digest_file(const std::string& path);

}  // namespace btcpanel
