#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kpz/simd.hpp"

namespace kpz::simd {
namespace {

Isa detect() {
  const char* env = std::getenv("KPZ_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::scalar;
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool avx2_available() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_available()) isa = Isa::scalar;
  current().store(isa);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

std::uint64_t and_count_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  return active_isa() == Isa::avx2 ? avx2::and_count_u8(a, b, n) : scalar::and_count_u8(a, b, n);
}

std::int64_t dot_i32(const std::int32_t* a, const std::int32_t* b, std::size_t n) {
  return active_isa() == Isa::avx2 ? avx2::dot_i32(a, b, n) : scalar::dot_i32(a, b, n);
}

}  // namespace kpz::simd
