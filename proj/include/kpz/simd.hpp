#pragma once

#include <cstddef>
#include <cstdint>

namespace kpz::simd {

enum class Isa { scalar, avx2 };

// avx2 when the cpu supports it, unless KPZ_SIMD=scalar is set
Isa active_isa();
void force_isa(Isa isa);
const char* isa_name(Isa isa);
bool avx2_available();

// sum_i (a_i & b_i)
std::uint64_t and_count_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
// sum_i a_i b_i, exact in 64-bit
std::int64_t dot_i32(const std::int32_t* a, const std::int32_t* b, std::size_t n);

namespace scalar {
std::uint64_t and_count_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
std::int64_t dot_i32(const std::int32_t* a, const std::int32_t* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
std::uint64_t and_count_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
std::int64_t dot_i32(const std::int32_t* a, const std::int32_t* b, std::size_t n);
}  // namespace avx2

}  // namespace kpz::simd
