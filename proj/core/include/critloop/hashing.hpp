#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace critloop {

// FNV-1a, pinned so fingerprints and seed derivations are stable across
// platforms and standard libraries.
constexpr std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (char c : data) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string to_hex(std::uint64_t value);

// Fingerprint used by the scripted model server's fixture store: the FNV-1a
// of the last user-message content, hex encoded.
std::string fingerprint(std::string_view content);

}  // namespace critloop
