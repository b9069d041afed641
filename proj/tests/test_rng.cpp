#include <set>

#include "doctest.h"
#include "seqfdr/rng.hpp"

using seqfdr::CounterRng;

TEST_SUITE("rng") {
  TEST_CASE("philox4x32-10 known answer for zero key and counter") {
    CounterRng rng(0, 0);
    CHECK(rng() == 0x6627e8d5e169c58dull);
    CHECK(rng() == 0xbc57ac4c9b00dbd8ull);
    CHECK(rng.blocks_consumed() == 1);
  }

  TEST_CASE("same key and substream give the same sequence") {
    CounterRng a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) REQUIRE(a() == b());
  }

  TEST_CASE("substreams and keys differ") {
    std::set<std::uint64_t> first;
    for (std::uint64_t s = 0; s < 100; ++s) first.insert(CounterRng(42, s)());
    for (std::uint64_t k = 0; k < 100; ++k) first.insert(CounterRng(k + 1000, 0)());
    CHECK(first.size() == 200);
  }

  TEST_CASE("uniform stays inside the open unit interval") {
    CounterRng rng(3, 0);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const double u = rng.uniform();
      lo = std::min(lo, u);
      hi = std::max(hi, u);
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
  }

  TEST_CASE("mix_seed separates tags") {
    CHECK(seqfdr::mix_seed(1, 0) != seqfdr::mix_seed(1, 1));
    CHECK(seqfdr::mix_seed(1, 0) != seqfdr::mix_seed(2, 0));
    static_assert(seqfdr::mix_seed(5, 5) == seqfdr::mix_seed(5, 5));
  }
}
