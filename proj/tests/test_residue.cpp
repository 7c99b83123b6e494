#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "modl/errors.hpp"
#include "modl/residue.hpp"

using namespace modl;

TEST_CASE("polynomial factorization mod ell") {
  // x^2 - 144169 = x^2 - 4 = (x-2)(x+2) mod 7
  auto f = fp_factor({3 /* -4 mod 7 */, 0, 1}, 7);
  REQUIRE(f.size() == 2);
  CHECK(f[0] == FpPoly{2, 1});  // x + 2 sorts before x - 2 = {5,1}
  CHECK(f[1] == FpPoly{5, 1});
  // x^2 - 2 is irreducible mod 5
  auto g = fp_factor({3, 0, 1}, 5);
  REQUIRE(g.size() == 1);
  CHECK(g[0] == FpPoly{3, 0, 1});
  // x^4 + 1 splits into four linears mod 17
  auto h = fp_factor({1, 0, 0, 0, 1}, 17);
  CHECK(h.size() == 4);
  for (const auto& p : h) CHECK(p.size() == 2);
  // deterministic: same call, same order
  CHECK(fp_factor({1, 0, 0, 0, 1}, 17) == h);
}

TEST_CASE("primes_above splits and refuses as documented") {
  auto K = NumberRing::quadratic(144169);
  auto maps7 = primes_above(K, 7);  // 144169 = 4 mod 7
  REQUIRE(maps7.size() == 2);
  CHECK(maps7[0]->inertia() == 1);
  CHECK(maps7[1]->inertia() == 1);
  CHECK(maps7[0]->index() == 0);
  CHECK(maps7[1]->index() == 1);

  auto Q = NumberRing::rationals();
  auto mq = primes_above(Q, 11);
  REQUIRE(mq.size() == 1);
  CHECK(mq[0]->inertia() == 1);

  CHECK_THROWS_AS(primes_above(K, 144169), NotSquareFreeModEll);
  CHECK_THROWS_AS(primes_above(K, 10), SchemaError);  // not prime

  // x^2 - 2 mod 5: inert, one map with inertia 2
  auto K2 = NumberRing::quadratic(2);
  auto maps5 = primes_above(K2, 5);
  REQUIRE(maps5.size() == 1);
  CHECK(maps5[0]->inertia() == 2);
}

TEST_CASE("inertia degrees sum to the ring degree") {
  auto K3 = NumberRing::make({-2, 0, 0, 1});  // x^3 - 2
  for (u64 ell : {5ULL, 7ULL, 11ULL, 31ULL, 101ULL}) {
    auto maps = primes_above(K3, ell);
    unsigned total = 0;
    for (const auto& m : maps) total += m->inertia();
    CHECK(total == 3);
  }
}

TEST_CASE("reduce examples") {
  auto K = NumberRing::quadratic(144169);
  // 144169 = 1 mod 3: x^2 - 1 = (x-1)(x+1)
  auto maps3 = primes_above(K, 3);
  REQUIRE(maps3.size() == 2);
  CHECK(maps3[0]->reduce(RingElement::zero(K)).is_zero());
  RingElement th = RingElement::theta(K);
  // theta maps to the root of its factor: 1 for (x+2)? ordering is canonical (x-1)=(x+2) mod 3 sorts by coeffs
  for (const auto& m : maps3) {
    ResidueElt r = m->reduce(th);
    CHECK_FALSE(r.is_zero());
    CHECK(r * r == m->one());  // theta^2 = 144169 = 1 mod 3
  }
  auto Q = NumberRing::rationals();
  auto m2 = primes_above(Q, 2)[0];
  CHECK_THROWS_AS(m2->reduce(RingElement::from_rational(Q, mpq_class(1, 2))),
                  DenominatorNotCoprime);
  // denominator only needs to be coprime to ell
  auto m5 = primes_above(Q, 5)[0];
  CHECK(m5->reduce(RingElement::from_rational(Q, mpq_class(1, 2))) == m5->from_u64(3));
}

TEST_CASE("reduce is a ring homomorphism") {
  auto K = NumberRing::quadratic(144169);
  std::mt19937_64 rng(9);
  auto rand_elt = [&]() {
    std::vector<mpq_class> c;
    // denominators in {1,2,3}: coprime to every tested ell
    for (unsigned i = 0; i < 2; ++i)
      c.emplace_back((long)(rng() % 2001) - 1000, (long)(rng() % 3) + 1);
    for (auto& q : c) q.canonicalize();
    return RingElement(K, c);
  };
  for (u64 ell : {7ULL, 11ULL, 13ULL, 5ULL}) {
    for (const auto& m : primes_above(K, ell)) {
      for (int it = 0; it < 40; ++it) {
        RingElement a = rand_elt(), b = rand_elt();
        CHECK(m->reduce(a * b) == m->reduce(a) * m->reduce(b));
        CHECK(m->reduce(a + b) == m->reduce(a) + m->reduce(b));
      }
    }
  }
}

TEST_CASE("rationals embed as scalars") {
  auto K = NumberRing::quadratic(2);
  auto m = primes_above(K, 5)[0];  // inertia 2
  // 7/3 mod 5 = 2 * inv(3) = 2*2 = 4
  ResidueElt r = m->reduce(RingElement::from_rational(K, mpq_class(7, 3)));
  CHECK(r == m->from_u64(4));
}

TEST_CASE("field arithmetic in F_25") {
  auto K = NumberRing::quadratic(2);
  auto m = primes_above(K, 5)[0];
  REQUIRE(m->inertia() == 2);
  ResidueElt x = m->reduce(RingElement::theta(K));
  CHECK(x * x == m->from_u64(2));
  // multiplicative order divides 24 and the element is a unit
  CHECK(x.pow(24) == m->one());
  CHECK(x.inverse() * x == m->one());
  CHECK_THROWS_AS(m->zero().inverse(), NotInvertible);
  // Fermat for random elements
  std::mt19937_64 rng(4);
  for (int it = 0; it < 25; ++it) {
    ResidueElt e = m->from_coords({rng() % 5, rng() % 5});
    if (e.is_zero()) continue;
    CHECK(e.pow(24) == m->one());
    CHECK(e * e.inverse() == m->one());
  }
}

TEST_CASE("lift is a section of reduce") {
  auto K = NumberRing::quadratic(144169);
  for (u64 ell : {7ULL, 13ULL}) {
    for (const auto& m : primes_above(K, ell)) {
      std::mt19937_64 rng(ell);
      for (int it = 0; it < 30; ++it) {
        std::vector<u64> c(m->inertia());
        for (auto& v : c) v = rng() % ell;
        ResidueElt e = m->from_coords(c);
        RingElement lifted = m->lift(e);
        CHECK(m->reduce(lifted) == e);
        // canonical coordinates stay in [0, ell)
        for (const auto& q : lifted.coords()) {
          CHECK(q.get_den() == 1);
          CHECK(q.get_num() >= 0);
          CHECK(q.get_num() < (long)ell);
        }
      }
    }
  }
}

TEST_CASE("char-2 factorization path") {
  // x^2 + x + 1 is irreducible mod 2; x^2 + x = x(x+1) splits
  auto s = fp_factor({0, 1, 1}, 2);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == FpPoly{0, 1});
  CHECK(s[1] == FpPoly{1, 1});
  auto irr = fp_factor({1, 1, 1}, 2);
  REQUIRE(irr.size() == 1);
  CHECK(irr[0] == FpPoly{1, 1, 1});
  // x^3 + x + 1 and x^3 + x^2 + 1: product splits into the two cubics (trace splitting)
  auto prod = fp_mul({1, 1, 0, 1}, {1, 0, 1, 1}, 2);
  auto back = fp_factor(prod, 2);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == FpPoly{1, 1, 0, 1});
  CHECK(back[1] == FpPoly{1, 0, 1, 1});
}
