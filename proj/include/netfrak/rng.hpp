#ifndef NETFRAK_RNG_HPP
#define NETFRAK_RNG_HPP

#include <cstdint>
#include <random>

namespace netfrak {

/// A 64-bit master seed plus a derivation path. Each path element mixes into
/// the seed with splitmix64, so substreams are independent of evaluation order.
class SeededRng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit SeededRng(std::uint64_t seed) : key_(seed), engine_(mix(seed)) {}

  SeededRng substream(std::uint64_t index) const {
    SeededRng child(mix(key_ ^ mix(index + 0x632be59bd9b4e019ULL)));
    return child;
  }

  std::uint64_t key() const { return key_; }

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
};

}  // namespace netfrak

#endif  // NETFRAK_RNG_HPP
