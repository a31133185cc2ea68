#pragma once

#include <cstdint>
#include <vector>

#include "leaklab/types.hpp"

namespace leaklab {

// Counter-based splittable generator. Output i of a stream is a pure
// function of (key, i), so child streams forked with distinct tags are
// independent of the parent's position.
class RngState {
 public:
  explicit RngState(std::uint64_t seed);

  std::uint64_t next_u64();
  // uniform on [0, 1)
  double uniform();
  // standard normal (Box-Muller, two uniforms per draw)
  double normal();
  // uniform integer in [0, n)
  std::uint64_t uniform_int(std::uint64_t n);

  // Child stream with a key derived from (key, tag); does not advance
  // the parent counter, so fork order is irrelevant.
  RngState fork(std::uint64_t tag) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return ctr_; }

  // in-place Fisher-Yates
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  RngState(std::uint64_t key, std::uint64_t ctr) : key_(key), ctr_(ctr) {}
  std::uint64_t key_;
  std::uint64_t ctr_;
};

// 64-bit FNV-1a, used to derive stream tags from structured coordinates
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ull);
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

}  // namespace leaklab
