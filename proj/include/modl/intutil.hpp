#pragma once
// Small integer utilities shared across modules: word-size modular arithmetic,
// deterministic Miller-Rabin, sieves, and a few exact mpz/mpq helpers.
#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace modl {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return (u128)a * b % m; }
inline u64 addmod(u64 a, u64 b, u64 m) {
  a %= m; b %= m;
  u64 s = a + b;
  return (s < a || s >= m) ? s - m : s;
}
inline u64 submod(u64 a, u64 b, u64 m) { a %= m; b %= m; return a >= b ? a - b : a + m - b; }

u64 powmod(u64 a, u64 e, u64 m);
u64 powmod(u64 a, const mpz_class& e, u64 m);
u64 invmod(u64 a, u64 m);  // throws NotInvertible if gcd(a,m) != 1

bool is_prime_u64(u64 n);            // deterministic MR for full u64 range
u64 next_prime_above(u64 n);         // smallest prime > n

std::vector<u64> primes_up_to(u64 n);
std::vector<int32_t> mobius_table(u64 n);             // mu(0) = 0 sentinel
std::vector<u64> smallest_prime_factor(u64 n);        // spf[0]=spf[1]=0

// trial-division factorization; fine for the modest sizes used here.
// Falls back to treating a large leftover as prime only if it passes MR;
// otherwise keeps splitting with Pollard rho.
std::vector<std::pair<mpz_class, unsigned>> factor_mpz(mpz_class n);

// largest s with s^2 | n, returned as (s, n/s^2); sign of n preserved on the
// square-free part. n != 0.
std::pair<mpz_class, mpz_class> square_part(const mpz_class& n);

// smallest integer t with t^q >= a^p (a >= 0, p,q >= 1): exact ceil(a^{p/q}).
mpz_class ceil_pow_rational(const mpz_class& a, unsigned long p, unsigned long q);

// ceil(n/d) for exact rationals
mpz_class ceil_div(const mpz_class& n, const mpz_class& d);

// strict decimal (optionally signed) integer / "a/b" rational parsing
mpz_class parse_mpz(const std::string& s);
mpq_class parse_mpq(const std::string& s);
std::string mpq_to_string(const mpq_class& q);  // "a" or "a/b", canonical

inline bool fits_u64(const mpz_class& z) { return z >= 0 && z.fits_ulong_p(); }

}  // namespace modl
