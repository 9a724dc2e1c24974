#include "forcesense/types.hpp"

namespace forcesense {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t base, const std::string& tag) {
  std::string buf;
  buf.reserve(8 + tag.size());
  for (int i = 0; i < 8; ++i) {
    buf.push_back(static_cast<char>((base >> (8 * i)) & 0xff));
  }
  buf += tag;
  std::uint64_t h = fnv1a64(buf);
  // splitmix64 finalizer for better bit diffusion
  h += 0x9e3779b97f4a7c15ull;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
  return h ^ (h >> 31);
}

}  // namespace forcesense
