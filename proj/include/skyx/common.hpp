#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace skyx {

/// Raised for malformed or semantically invalid input data (exit code 2 at the CLI).
struct data_error : std::runtime_error {
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for misuse of the command line or an API precondition (exit code 1 at the CLI).
struct usage_error : std::runtime_error {
  explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

/// splitmix64 step; the de-facto standard 64-bit mixer.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Deterministic sub-seed for stream `stream` of master seed `seed`.
inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  return mix64(seed ^ mix64(stream + 1));
}

/// Minimal deterministic PRNG (splitmix64 sequence). Identical output on every
/// platform, unlike distributions from <random>.
class rng {
 public:
  explicit rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  /// Uniform in [0, n). n must be > 0.
  uint64_t next_below(uint64_t n) { return next_u64() % n; }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  uint64_t state_;
};

/// Growable bitvector used for dominance bookkeeping. Positions index the
/// arrival order of verified states; unset tail positions read as zero.
class bitvec {
 public:
  void set(size_t pos) {
    size_t word = pos >> 6;
    if (word >= words_.size()) words_.resize(word + 1, 0);
    words_[word] |= (uint64_t{1} << (pos & 63));
  }

  bool test(size_t pos) const {
    size_t word = pos >> 6;
    if (word >= words_.size()) return false;
    return (words_[word] >> (pos & 63)) & 1;
  }

  uint64_t popcount() const {
    uint64_t n = 0;
    for (uint64_t w : words_) n += static_cast<uint64_t>(__builtin_popcountll(w));
    return n;
  }

  void or_with(const bitvec& other) {
    if (other.words_.size() > words_.size()) words_.resize(other.words_.size(), 0);
    for (size_t i = 0; i < other.words_.size(); ++i) words_[i] |= other.words_[i];
  }

  const std::vector<uint64_t>& words() const { return words_; }

 private:
  std::vector<uint64_t> words_;
};

/// Popcount of the union of a set of bitvectors.
inline uint64_t union_popcount(const std::vector<const bitvec*>& vs) {
  bitvec acc;
  for (const bitvec* v : vs) acc.or_with(*v);
  return acc.popcount();
}

}  // namespace skyx
