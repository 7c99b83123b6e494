#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "modl/errors.hpp"
#include "modl/intutil.hpp"

using namespace modl;

TEST_CASE("modular arithmetic basics") {
  CHECK(mulmod(0xffffffffffffffffULL % 97, 12345, 97) == (u64)((0xffffffffffffffffULL % 97) * 12345 % 97));
  CHECK(addmod(96, 96, 97) == 95);
  CHECK(submod(3, 96, 97) == 4);
  CHECK(powmod(2, 10, 1000) == 24);
  CHECK(powmod(3, mpz_class("1000000000000"), 7) == powmod(3, 1000000000000ULL % 6, 7));
  CHECK(invmod(3, 7) == 5);
  CHECK_THROWS_AS(invmod(6, 9), NotInvertible);
}

TEST_CASE("primality") {
  CHECK(is_prime_u64(2));
  CHECK(is_prime_u64(144169));
  CHECK_FALSE(is_prime_u64(1));
  CHECK_FALSE(is_prime_u64(144169ULL * 144169ULL));
  CHECK(is_prime_u64(998244353));
  CHECK(is_prime_u64((u64)1e18 + 9));
  CHECK_FALSE(is_prime_u64((u64)1e18 + 7));
  CHECK(next_prime_above(100) == 101);
  CHECK(next_prime_above(2) == 3);
  auto ps = primes_up_to(30);
  CHECK(ps == std::vector<u64>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
}

TEST_CASE("mobius and spf tables") {
  auto mu = mobius_table(12);
  CHECK(mu[1] == 1);
  CHECK(mu[2] == -1);
  CHECK(mu[4] == 0);
  CHECK(mu[6] == 1);
  CHECK(mu[12] == 0);
  auto spf = smallest_prime_factor(12);
  CHECK(spf[2] == 2);
  CHECK(spf[9] == 3);
  CHECK(spf[11] == 11);
  CHECK(spf[12] == 2);
}

TEST_CASE("factor_mpz and square_part") {
  auto f = factor_mpz(mpz_class(1200));  // 2^4 * 3 * 5^2
  REQUIRE(f.size() == 3);
  CHECK(f[0].first == 2);
  CHECK(f[0].second == 4);
  CHECK(f[1].first == 3);
  CHECK(f[1].second == 1);
  CHECK(f[2].first == 5);
  CHECK(f[2].second == 2);

  auto [s, rest] = square_part(mpz_class(576) * 144169);
  CHECK(s == 24);
  CHECK(rest == 144169);
  auto [s2, r2] = square_part(mpz_class(-18));
  CHECK(s2 == 3);
  CHECK(r2 == -2);
  auto [s3, r3] = square_part(mpz_class(1));
  CHECK(s3 == 1);
  CHECK(r3 == 1);
}

TEST_CASE("ceil_pow_rational computes ceil(a^(p/q)) exactly") {
  CHECK(ceil_pow_rational(2, 1, 2) == 2);
  CHECK(ceil_pow_rational(4, 1, 2) == 2);
  CHECK(ceil_pow_rational(8, 1, 2) == 3);
  CHECK(ceil_pow_rational(27, 2, 3) == 9);
  CHECK(ceil_pow_rational(28, 2, 3) == 10);
  CHECK(ceil_pow_rational(16, 1, 1) == 16);
  // (16 * 2^23)^(2/2): the exact integer 2^27
  CHECK(ceil_pow_rational(mpz_class(16) * (mpz_class(1) << 23), 2, 2) == 134217728);
}

TEST_CASE("ceil_div") {
  CHECK(ceil_div(7, 2) == 4);
  CHECK(ceil_div(8, 2) == 4);
  CHECK(ceil_div(-7, 2) == -3);
}

TEST_CASE("string parsing round trips") {
  CHECK(parse_mpz("-123456789012345678901234567890") ==
        mpz_class("-123456789012345678901234567890"));
  CHECK(parse_mpq("3/6") == mpq_class(1, 2));
  CHECK(parse_mpq("-5") == mpq_class(-5));
  CHECK(mpq_to_string(mpq_class(1, 2)) == "1/2");
  CHECK(mpq_to_string(mpq_class(-7)) == "-7");
  CHECK_THROWS_AS(parse_mpz("12x"), SchemaError);
  CHECK_THROWS_AS(parse_mpq(""), SchemaError);
  CHECK_THROWS_AS(parse_mpq("1/0"), SchemaError);
}
