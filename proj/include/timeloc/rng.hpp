#ifndef TIMELOC_RNG_HPP
#define TIMELOC_RNG_HPP

#include <cstdint>

// Counter-based random streams: every value is a pure function of
// (seed, stream, realization, index), so ensemble loops produce identical
// numbers for any worker count or evaluation order.

namespace timeloc {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

struct CounterRng {
  std::uint64_t seed = 0;

  std::uint64_t bits(std::uint64_t stream, std::uint64_t realization,
                     std::uint64_t index) const {
    std::uint64_t z = detail::mix64(seed ^ 0x6a09e667f3bcc909ULL);
    z = detail::mix64(z ^ stream);
    z = detail::mix64(z ^ realization);
    z = detail::mix64(z ^ index);
    return z;
  }

  // uniform in [0, 1)
  double uniform01(std::uint64_t stream, std::uint64_t realization,
                   std::uint64_t index) const {
    return static_cast<double>(bits(stream, realization, index) >> 11) *
           0x1.0p-53;
  }

  // uniform in [0, 2*pi)
  double phase(std::uint64_t stream, std::uint64_t realization,
               std::uint64_t index) const {
    return 6.283185307179586476925286766559 *
           uniform01(stream, realization, index);
  }
};

// Stream tags, one per consumer so streams never collide.
namespace stream {
inline constexpr std::uint64_t drive_phase = 0x01;
inline constexpr std::uint64_t line_phase = 0x02;
}  // namespace stream

}  // namespace timeloc

#endif
