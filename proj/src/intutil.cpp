#include "modl/intutil.hpp"

#include <numeric>
#include <stdexcept>

#include "modl/errors.hpp"

namespace modl {

u64 powmod(u64 a, u64 e, u64 m) {
  if (m == 1) return 0;
  u64 r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

u64 powmod(u64 a, const mpz_class& e, u64 m) {
  if (m == 1) return 0;
  if (e < 0) return powmod(invmod(a % m, m), mpz_class(-e), m);
  u64 r = 1;
  a %= m;
  // scan e bit by bit
  for (mp_bitcnt_t i = mpz_sizeinbase(e.get_mpz_t(), 2); i-- > 0;) {
    r = mulmod(r, r, m);
    if (mpz_tstbit(e.get_mpz_t(), i)) r = mulmod(r, a, m);
  }
  return r;
}

u64 invmod(u64 a, u64 m) {
  a %= m;
  i64 t = 0, newt = 1;
  i64 r = (i64)m, newr = (i64)a;
  while (newr != 0) {
    i64 q = r / newr;
    t -= q * newt; std::swap(t, newt);
    r -= q * newr; std::swap(r, newr);
  }
  if (r != 1) throw NotInvertible("invmod: gcd(" + std::to_string(a) + ", " + std::to_string(m) + ") != 1");
  return (u64)(t < 0 ? t + (i64)m : t);
}

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull})
    if (n % p == 0) return n == p;
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  // deterministic base set for 64-bit range
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod(a % n, d, n);
    if (x == 0 || x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 0; i < s - 1; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) { witness = false; break; }
    }
    if (witness) return false;
  }
  return true;
}

u64 next_prime_above(u64 n) {
  u64 c = n + 1;
  if (c <= 2) return 2;
  if ((c & 1) == 0) ++c;
  while (!is_prime_u64(c)) c += 2;
  return c;
}

std::vector<u64> primes_up_to(u64 n) {
  std::vector<bool> comp(n + 1, false);
  std::vector<u64> out;
  for (u64 i = 2; i <= n; ++i) {
    if (!comp[i]) {
      out.push_back(i);
      for (u64 j = i * i; j <= n; j += i) comp[j] = true;
    }
  }
  return out;
}

std::vector<int32_t> mobius_table(u64 n) {
  std::vector<int32_t> mu(n + 1, 1);
  std::vector<u64> spf = smallest_prime_factor(n);
  mu[0] = 0;
  for (u64 i = 2; i <= n; ++i) {
    u64 p = spf[i];
    u64 m = i / p;
    mu[i] = (m % p == 0) ? 0 : -mu[m];
  }
  return mu;
}

std::vector<u64> smallest_prime_factor(u64 n) {
  std::vector<u64> spf(n + 1, 0);
  for (u64 i = 2; i <= n; ++i) {
    if (spf[i] == 0) {
      for (u64 j = i; j <= n; j += i)
        if (spf[j] == 0) spf[j] = i;
    }
  }
  return spf;
}

namespace {

u64 pollard_rho(u64 n) {
  if ((n & 1) == 0) return 2;
  u64 x = 2, y = 2, d = 1, c = 1;
  while (d == 1 || d == n) {
    if (d == n) { ++c; x = y = 2; }
    x = addmod(mulmod(x, x, n), c, n);
    y = addmod(mulmod(y, y, n), c, n);
    y = addmod(mulmod(y, y, n), c, n);
    d = std::gcd(x > y ? x - y : y - x, n);
    if (x == y) { ++c; x = 2; y = 2; d = 1; }
  }
  return d;
}

void factor_u64_into(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) { out.push_back(n); return; }
  u64 d = pollard_rho(n);
  factor_u64_into(d, out);
  factor_u64_into(n / d, out);
}

}  // namespace

std::vector<std::pair<mpz_class, unsigned>> factor_mpz(mpz_class n) {
  if (n < 0) n = -n;
  if (n <= 1) return {};
  std::vector<std::pair<mpz_class, unsigned>> out;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
    unsigned e = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) { mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p); ++e; }
    if (e) out.emplace_back(p, e);
  }
  u64 p = 17;
  while (n > 1 && mpz_class(p) * p <= n && p < (1ull << 20)) {
    unsigned e = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) { mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p); ++e; }
    if (e) out.emplace_back(p, e);
    p += 2;
  }
  if (n > 1) {
    if (n.fits_ulong_p()) {
      std::vector<u64> fs;
      factor_u64_into(n.get_ui(), fs);
      std::sort(fs.begin(), fs.end());
      for (size_t i = 0; i < fs.size();) {
        size_t j = i;
        while (j < fs.size() && fs[j] == fs[i]) ++j;
        out.emplace_back(fs[i], (unsigned)(j - i));
        i = j;
      }
    } else if (mpz_probab_prime_p(n.get_mpz_t(), 40)) {
      out.emplace_back(n, 1);
    } else {
      // beyond the sizes this project needs; refuse rather than mis-factor
      throw MathError("factor_mpz: composite too large to factor: " + n.get_str());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<mpz_class, mpz_class> square_part(const mpz_class& n) {
  if (n == 0) throw MathError("square_part: zero");
  mpz_class a = n < 0 ? mpz_class(-n) : n;
  mpz_class s = 1, rest = n < 0 ? mpz_class(-1) : mpz_class(1);
  for (auto& [p, e] : factor_mpz(a)) {
    for (unsigned i = 0; i < e / 2; ++i) s *= p;
    if (e % 2) rest *= p;
  }
  return {s, rest};
}

mpz_class ceil_pow_rational(const mpz_class& a, unsigned long p, unsigned long q) {
  if (a < 0) throw MathError("ceil_pow_rational: negative base");
  mpz_class ap;
  mpz_pow_ui(ap.get_mpz_t(), a.get_mpz_t(), p);
  mpz_class root;
  int exact = mpz_root(root.get_mpz_t(), ap.get_mpz_t(), q);
  if (!exact) root += 1;
  return root;
}

mpz_class ceil_div(const mpz_class& n, const mpz_class& d) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  return q;
}

mpz_class parse_mpz(const std::string& s) {
  if (s.empty()) throw SchemaError("empty integer string");
  size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw SchemaError("bad integer string '" + s + "'");
  for (; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') throw SchemaError("bad integer string '" + s + "'");
  return mpz_class(s, 10);
}

mpq_class parse_mpq(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return mpq_class(parse_mpz(s));
  mpz_class num = parse_mpz(s.substr(0, slash));
  mpz_class den = parse_mpz(s.substr(slash + 1));
  if (den == 0) throw SchemaError("zero denominator in '" + s + "'");
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

std::string mpq_to_string(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace modl
