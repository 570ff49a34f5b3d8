#pragma once

// Deterministic, splittable random streams. Every consumer derives its own
// stream from (seed, scope-string), so the draw order of one stage can never
// perturb another. splitmix64 underneath: pure integer arithmetic, identical
// on every platform.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dtv {

namespace detail {

inline std::uint64_t splitmix_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64() { return detail::splitmix_next(state_); }

  // Unbiased draw in [0, n) via rejection.
  std::uint64_t next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  long long next_int(long long lo, long long hi) {  // inclusive bounds
    return lo + static_cast<long long>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_unit() < p; }

  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = next_below(i);
      std::swap(v[i - 1], v[j]);
    }
    return v;
  }

  // k distinct indices from [0, n), in random order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    for (std::size_t i = 0; i < k && i < n; ++i) {
      std::size_t j = i + next_below(n - i);
      std::swap(v[i], v[j]);
    }
    v.resize(k < n ? k : n);
    return v;
  }

 private:
  std::uint64_t state_;
};

// The only constructor used in practice. Scopes are free-form path-like
// strings ("formalize/gsm8k-17/3/0"); distinct scopes get independent
// streams, and the same (seed, scope) pair always yields the same stream.
inline Rng derive_rng(std::uint64_t seed, std::string_view scope) {
  std::uint64_t h = detail::fnv1a64(scope);
  std::uint64_t s = seed;
  std::uint64_t mixed = detail::splitmix_next(s) ^ h;
  // One more round so adjacent seeds do not produce adjacent states.
  return Rng(detail::splitmix_next(mixed));
}

}  // namespace dtv
