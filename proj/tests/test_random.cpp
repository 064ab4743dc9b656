#include "qsdlab/random.hpp"

#include <doctest.h>

#include <cmath>

using namespace qsd;

TEST_SUITE("random") {

TEST_CASE("counter rng is a pure function of seed, stream and counter") {
  CounterRng a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
    CHECK(x != d.next_u64());
  }
  CHECK(a.counter() == 10);
}

TEST_CASE("splitmix64 reference output") {
  // First output of the SplitMix64 generator seeded with 0.
  CHECK(splitmix64_mix(0x9E3779B97F4A7C15ULL) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("uniform and normal moments") {
  CounterRng rng(7);
  const int n = 20000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(std::abs(su / n - 0.5) < 0.01);
  CHECK(std::abs(sn / n) < 0.03);
  CHECK(std::abs(sn2 / n - 1.0) < 0.05);
}

TEST_CASE("random objects satisfy their invariants") {
  CounterRng rng(1);
  for (Index d : {1, 2, 5, 16}) {
    CHECK(unitarity_defect(random_unitary(d, rng).matrix()) < 1e-12);
    CHECK(random_state(BasisTag::generic(d), rng).is_normalized());
    const HermitianGenerator h = random_hermitian(d, rng);
    CHECK(std::abs(spectral_norm(h.matrix()) - 1.0) < 1e-12);
  }
}

}  // TEST_SUITE
