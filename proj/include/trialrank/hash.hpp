#pragma once

#include <cstdint>
#include <string>

namespace trialrank {

// FNV-1a, 64-bit. Used for artifact fingerprints and manifest chaining,
// not for anything adversarial.
struct Fnv1a {
  std::uint64_t state = 0xcbf29ce484222325ull;

  void update(const void* data, std::size_t len);
  void update(const std::string& s) { update(s.data(), s.size()); }
  template <typename T>
  void update_pod(const T& v) { update(&v, sizeof(T)); }

  std::uint64_t digest() const { return state; }
};

std::uint64_t hash_bytes(const void* data, std::size_t len);
std::uint64_t hash_string(const std::string& s);
// Hashes the full contents of a file; throws std::runtime_error on I/O error.
std::uint64_t hash_file(const std::string& path);

std::string hash_hex(std::uint64_t h);

}  // namespace trialrank
