#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "modl/errors.hpp"
#include "modl/numring.hpp"

using namespace modl;

TEST_CASE("ring construction") {
  CHECK(NumberRing::rationals()->degree() == 1);
  auto K = NumberRing::quadratic(144169);
  CHECK(K->degree() == 2);
  CHECK(K->min_poly() == std::vector<mpz_class>{-144169, 0, 1});
  CHECK_THROWS_AS(NumberRing::make({-4, 0, 1}), RationalRootFound);    // x^2 - 4
  CHECK_THROWS_AS(NumberRing::make({0, 0, 1}), RationalRootFound);     // x^2
  CHECK_THROWS_AS(NumberRing::make({-1, 0, 2}), NotMonic);             // 2x^2 - 1
  CHECK_THROWS_AS(NumberRing::make({}), NotMonic);
  CHECK(NumberRing::make({5, 1})->degree() == 1);  // x + 5 is a fine rational presentation
  // cubic without rational roots passes the cheap check
  CHECK(NumberRing::make({-2, 0, 0, 1})->degree() == 3);  // x^3 - 2
  CHECK_THROWS_AS(NumberRing::make({-8, 0, 0, 1}), RationalRootFound);  // x^3 - 8
}

TEST_CASE("ring element arithmetic") {
  auto K = NumberRing::quadratic(144169);
  RingElement th = RingElement::theta(K);
  CHECK(th * th == RingElement::from_int(K, 144169));
  RingElement a = RingElement::from_int(K, 540) - th * mpq_class(12);
  RingElement b = RingElement::from_int(K, 540) + th * mpq_class(12);
  CHECK(a + b == RingElement::from_int(K, 1080));
  // (540 - 12t)(540 + 12t) = 540^2 - 144*144169
  CHECK(a * b == RingElement::from_rational(K, mpq_class(540) * 540 - mpq_class(144) * 144169));
  CHECK(a - a == RingElement::zero(K));
  CHECK((a * a.inverse()) == RingElement::one(K));
  CHECK_THROWS_AS(RingElement::zero(K).inverse(), NotInvertible);
}

TEST_CASE("norms match the resultant values") {
  auto K = NumberRing::quadratic(144169);
  CHECK(RingElement::from_int(K, 5).norm() == 25);
  RingElement beta2 = RingElement::theta(K) * mpq_class(24);  // 2*beta = 24*theta
  CHECK(beta2.norm() == mpq_class(-576) * 144169);
  CHECK(beta2.norm() == -83041344);
  CHECK(RingElement::zero(K).norm() == 0);
  // trace of a + b*theta is 2a
  RingElement e = RingElement::from_int(K, 540) - RingElement::theta(K) * mpq_class(12);
  CHECK(e.trace() == 1080);
}

TEST_CASE("norm is multiplicative") {
  auto K3 = NumberRing::make({-2, 0, 0, 1});  // x^3 - 2
  std::mt19937_64 rng(1);
  auto rand_elt = [&]() {
    std::vector<mpq_class> c;
    for (unsigned i = 0; i < 3; ++i)
      c.emplace_back((long)(rng() % 19) - 9, (long)(rng() % 7) + 1);
    for (auto& q : c) q.canonicalize();
    return RingElement(K3, c);
  };
  for (int it = 0; it < 50; ++it) {
    RingElement a = rand_elt(), b = rand_elt();
    CHECK((a * b).norm() == a.norm() * b.norm());
  }
}

TEST_CASE("inverse in a cubic field") {
  auto K3 = NumberRing::make({-2, 0, 0, 1});
  RingElement th = RingElement::theta(K3);
  RingElement e = RingElement::one(K3) + th;  // 1 + 2^(1/3)
  CHECK(e * e.inverse() == RingElement::one(K3));
  CHECK(th.inverse() * th == RingElement::one(K3));
}

TEST_CASE("ring mismatch is refused") {
  auto K1 = NumberRing::quadratic(144169);
  auto K2 = NumberRing::quadratic(5);
  CHECK_THROWS_AS(RingElement::one(K1) + RingElement::one(K2), RingMismatch);
}

TEST_CASE("rational detection") {
  auto K = NumberRing::quadratic(5);
  RingElement e = RingElement::from_rational(K, mpq_class(3, 7));
  CHECK(e.is_rational_value());
  CHECK(e.rational_value() == mpq_class(3, 7));
  CHECK_FALSE(RingElement::theta(K).is_rational_value());
}
