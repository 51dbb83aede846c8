#include <doctest.h>

#include <set>

#include "forestlab/rng.hpp"
#include "forestlab/stats.hpp"

using namespace forestlab;

TEST_CASE("philox known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    seen.insert(x);
    seen.insert(c());
    seen.insert(d());
  }
  CHECK(seen.size() == 300);
  CHECK(a.draws() == 100);
}

TEST_CASE("substreams depend on identity, not position") {
  RngStream a(1, 0);
  const RngStream s0 = a.substream(5);
  for (int i = 0; i < 10; ++i) a();
  RngStream s1 = a.substream(5), s2 = s0;
  for (int i = 0; i < 20; ++i) CHECK(s1() == s2());
  RngStream t = a.substream(6);
  RngStream u = a.substream(5);
  CHECK(t() != u());
}

TEST_CASE("uniform_index is unbiased on small bounds") {
  RngStream rng(11, 0);
  std::vector<double> counts(6, 0.0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) counts[rng.uniform_index(6)] += 1;
  const std::vector<double> p(6, 1.0 / 6);
  CHECK(chi_square_goodness_of_fit(counts, p).p_value > 1e-3);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
