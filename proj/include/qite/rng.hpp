#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace qite {

// mt19937_64 with hand-rolled draws. std::uniform_* distributions are
// implementation-defined, so instances and samples would not reproduce
// across standard libraries; these draws are pinned to the raw engine
// output and reproduce everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform in [0, 1) with 53 random bits
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, bound), unbiased via masked rejection
  std::uint64_t bounded(std::uint64_t bound) {
    if (bound <= 1) return 0;
    std::uint64_t mask = ~std::uint64_t{0} >> __builtin_clzll(bound - 1);
    std::uint64_t v;
    do {
      v = eng_() & mask;
    } while (v >= bound);
    return v;
  }

  // standard normal, Box-Muller
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace qite
