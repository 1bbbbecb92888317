#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace mlfgm {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Decorrelated seed for (stream, index) under one master seed, so that trials
// and generator stages draw from independent substreams regardless of order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  std::uint64_t s = master ^ (0x9e3779b97f4a7c15ull * (stream + 1));
  std::uint64_t z = splitmix64(s);
  s ^= 0xbf58476d1ce4e5b9ull * (index + 1);
  return z ^ splitmix64(s);
}

// mt19937_64 engine with hand-rolled uniform/normal draws. The engine output
// is pinned by the standard; std::*_distribution is not, and benchmark CSVs
// must be reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() { return double(eng_() >> 11) * 0x1.0p-53; }  // [0, 1)

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  int uniform_int(int n) {  // [0, n)
    return int(eng_() % std::uint64_t(n));
  }

  double gaussian() {  // standard normal, Box-Muller
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t next_u64() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mlfgm
