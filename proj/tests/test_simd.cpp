#include <random>

#include "doctest.h"
#include "kpz/simd.hpp"

using namespace kpz::simd;

TEST_CASE("and-count: scalar and avx2 agree exactly") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {0u, 1u, 31u, 32u, 33u, 257u, 5000u}) {
    std::vector<std::uint8_t> a(n), b(n);
    std::uint64_t ref = 0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<std::uint8_t>(rng() & 1);
      b[i] = static_cast<std::uint8_t>(rng() & 1);
      ref += a[i] & b[i];
    }
    CHECK(scalar::and_count_u8(a.data(), b.data(), n) == ref);
    if (avx2_available()) CHECK(avx2::and_count_u8(a.data(), b.data(), n) == ref);
    CHECK(and_count_u8(a.data(), b.data(), n) == ref);
  }
}

TEST_CASE("int32 dot: scalar and avx2 agree exactly, including overflow-sized products") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::int32_t> big(-2000000000, 2000000000), small(-1000, 1000);
  for (std::size_t n : {0u, 1u, 7u, 8u, 9u, 100u, 4099u}) {
    for (bool wide : {false, true}) {
      std::vector<std::int32_t> a(n), b(n);
      std::int64_t ref = 0;
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = wide ? big(rng) : small(rng);
        b[i] = wide ? static_cast<std::int32_t>(small(rng)) : small(rng);
        ref += static_cast<std::int64_t>(a[i]) * b[i];
      }
      CHECK(scalar::dot_i32(a.data(), b.data(), n) == ref);
      if (avx2_available()) CHECK(avx2::dot_i32(a.data(), b.data(), n) == ref);
    }
  }
}

TEST_CASE("forced dispatch") {
  const Isa before = active_isa();
  force_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  CHECK(std::string(isa_name(Isa::scalar)) == "scalar");
  std::vector<std::uint8_t> a(100, 1);
  CHECK(and_count_u8(a.data(), a.data(), a.size()) == 100);
  force_isa(before);
  CHECK(active_isa() == before);
}
