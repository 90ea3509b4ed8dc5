#include "kpz/simd.hpp"

namespace kpz::simd::scalar {

std::uint64_t and_count_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<std::uint64_t>(a[i] & b[i]);
  return s;
}

std::int64_t dot_i32(const std::int32_t* a, const std::int32_t* b, std::size_t n) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<std::int64_t>(a[i]) * b[i];
  return s;
}

}  // namespace kpz::simd::scalar
