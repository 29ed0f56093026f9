#ifndef CFMAC_RNG_HPP_
#define CFMAC_RNG_HPP_

#include <cstdint>
#include <random>
#include <vector>

namespace cfmac {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream for (seed, stream). Trials and codebooks use this so
// that results do not depend on thread scheduling.
// Child seed for hierarchical streams (experiment -> trial -> component).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

inline Rng derive_rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

// Uniform on [0,1) with 53 random bits. Unlike std::uniform_real_distribution
// this is identical across standard library implementations.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Inverse-CDF draw from a (not necessarily normalized) weight vector.
inline int sample_index(const double* w, int n, Rng& rng) {
  double t = 0.0;
  for (int i = 0; i < n; ++i) t += w[i];
  double u = uniform01(rng) * t;
  int last = -1;
  for (int i = 0; i < n; ++i) {
    if (w[i] <= 0.0) continue;
    last = i;
    if (u < w[i]) return i;
    u -= w[i];
  }
  return last;
}

inline int sample_index(const std::vector<double>& w, Rng& rng) {
  return sample_index(w.data(), static_cast<int>(w.size()), rng);
}

}  // namespace cfmac

#endif  // CFMAC_RNG_HPP_
