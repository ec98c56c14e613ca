#pragma once

// Counter-based random number generation.
//
// Every trajectory owns an independent stream keyed by (master_seed,
// stream_id).  The generator is Philox4x64-10; a stream's output is a pure
// function of (key, block counter), so results are bitwise reproducible
// regardless of how trajectories are scheduled across threads.
//
// Gaussian variates use Box-Muller on 52-bit uniforms.  The consumption
// order (one 64-bit word per uniform, two words per Gaussian pair) is part
// of the determinism contract and must not change.

#include <cstdint>
#include <cmath>

namespace polykin {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

} // namespace detail

// Philox4x64-10 block cipher (Random123 constants).  Maps a 256-bit counter
// and 128-bit key to 256 bits of output.
struct Philox4x64 {
  static constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ull;
  static constexpr std::uint64_t M1 = 0xCA5A826395121157ull;
  static constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t W1 = 0xBB67AE8584CAA73Bull;

  struct Block {
    std::uint64_t w[4];
  };

  static inline void mulhilo(std::uint64_t a, std::uint64_t b,
                             std::uint64_t& hi, std::uint64_t& lo) {
    unsigned __int128 prod =
        static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
    hi = static_cast<std::uint64_t>(prod >> 64);
    lo = static_cast<std::uint64_t>(prod);
  }

  static Block block(std::uint64_t k0, std::uint64_t k1,
                     std::uint64_t c0, std::uint64_t c1 = 0,
                     std::uint64_t c2 = 0, std::uint64_t c3 = 0) {
    std::uint64_t x0 = c0, x1 = c1, x2 = c2, x3 = c3;
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        k0 += W0;
        k1 += W1;
      }
      std::uint64_t hi0, lo0, hi1, lo1;
      mulhilo(M0, x0, hi0, lo0);
      mulhilo(M1, x2, hi1, lo1);
      std::uint64_t y0 = hi1 ^ x1 ^ k0;
      std::uint64_t y1 = lo1;
      std::uint64_t y2 = hi0 ^ x3 ^ k1;
      std::uint64_t y3 = lo0;
      x0 = y0; x1 = y1; x2 = y2; x3 = y3;
    }
    return Block{{x0, x1, x2, x3}};
  }
};

// One per-trajectory random stream.  Cheap to copy; 40 bytes of state.
class RandomStream {
 public:
  RandomStream() : RandomStream(0, 0) {}

  RandomStream(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t x = master_seed ^ (0x6A09E667F3BCC909ull + stream_id *
                                     0x9E3779B97F4A7C15ull);
    k0_ = detail::splitmix64(x);
    k1_ = detail::splitmix64(x);
    ctr_ = 0;
    fill_ = 0;
    pos_ = 0;
    have_gauss_ = false;
    gauss_ = 0.0;
  }

  // Uniform on the open interval (0,1) with 52-bit resolution.
  double uniform() {
    return to_unit(next_word());
  }

  // Standard normal via Box-Muller; draws two words per produced pair.
  double gaussian() {
    if (have_gauss_) {
      have_gauss_ = false;
      return gauss_;
    }
    double u1 = to_unit(next_word());
    double u2 = to_unit(next_word());
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    gauss_ = r * std::sin(a);
    have_gauss_ = true;
    return r * std::cos(a);
  }

  std::uint64_t next_word() {
    if (pos_ == fill_) {
      Philox4x64::Block b = Philox4x64::block(k0_, k1_, ctr_++);
      buf_[0] = b.w[0]; buf_[1] = b.w[1]; buf_[2] = b.w[2]; buf_[3] = b.w[3];
      fill_ = 4;
      pos_ = 0;
    }
    return buf_[pos_++];
  }

  static double to_unit(std::uint64_t v) {
    // ((v >> 12) + 0.5) * 2^-52: strictly inside (0,1).  With 52 bits both
    // endpoints stay exactly representable, so no rounding can reach 0 or 1
    // (the 53-bit variant rounds its top value up to exactly 1.0).
    return (static_cast<double>(v >> 12) + 0.5) * 0x1p-52;
  }

 private:
  std::uint64_t k0_, k1_;
  std::uint64_t ctr_;
  std::uint64_t buf_[4];
  int fill_, pos_;
  bool have_gauss_;
  double gauss_;
};

} // namespace polykin
