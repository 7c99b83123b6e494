#include "modl/conv.hpp"

#include <algorithm>

#include "modl/errors.hpp"

namespace modl {

namespace {

// NTT-friendly primes c*2^k + 1 with primitive root 3; min 2-adic order 2^21
constexpr u64 NTT_P[3] = {998244353ull, 1004535809ull, 469762049ull};
constexpr u64 NTT_G = 3;

void ntt(std::vector<u64>& a, bool invert, u64 p) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    u64 w = powmod(NTT_G, (p - 1) / len, p);
    if (invert) w = invmod(w, p);
    for (std::size_t i = 0; i < n; i += len) {
      u64 wn = 1;
      for (std::size_t j = 0; j < len / 2; ++j) {
        u64 u = a[i + j], v = mulmod(a[i + j + len / 2], wn, p);
        a[i + j] = addmod(u, v, p);
        a[i + j + len / 2] = submod(u, v, p);
        wn = mulmod(wn, w, p);
      }
    }
  }
  if (invert) {
    u64 ninv = invmod((u64)n % p, p);
    for (auto& x : a) x = mulmod(x, ninv, p);
  }
}

std::vector<u64> conv_one_prime(const std::vector<u64>& a, const std::vector<u64>& b,
                                std::size_t out_len, u64 p) {
  std::size_t need = std::min(out_len, a.size() + b.size() - 1);
  std::size_t n = 1;
  while (n < a.size() + b.size() - 1) n <<= 1;
  std::vector<u64> fa(n, 0), fb(n, 0);
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i] % p;
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i] % p;
  ntt(fa, false, p);
  ntt(fb, false, p);
  for (std::size_t i = 0; i < n; ++i) fa[i] = mulmod(fa[i], fb[i], p);
  ntt(fa, true, p);
  fa.resize(need);
  return fa;
}

}  // namespace

bool conv_ntt_applicable(u64 ell, std::size_t out_len) {
  if (ell < 2) return false;
  // true coefficient bound: out_len * (ell-1)^2 must stay below p0*p1*p2
  if (ell - 1 >= (1ull << 35)) return false;
  u128 bound = (u128)out_len * (ell - 1) * (ell - 1);
  u128 cap = (u128)NTT_P[0] * NTT_P[1] * NTT_P[2];
  if (bound >= cap) return false;
  // transform length limit: 2-adic order of the weakest prime (2^21)
  std::size_t n = 1;
  while (n < 2 * out_len) n <<= 1;
  return n <= (1ull << 21);
}

std::vector<u64> conv_mod_ref(const std::vector<u64>& a, const std::vector<u64>& b,
                              u64 ell, std::size_t out_len) {
  std::vector<u64> out(out_len, 0);
  if (a.empty() || b.empty()) return out;
  const bool narrow = ell <= (1ull << 32);  // products fit u64, sums fit u128 safely
  for (std::size_t n = 0; n < out_len; ++n) {
    std::size_t lo = n >= b.size() - 1 ? n - (b.size() - 1) : 0;
    std::size_t hi = std::min(n, a.size() - 1);
    if (narrow) {
      u128 acc = 0;
      for (std::size_t i = lo; i <= hi; ++i) acc += (u128)a[i] * b[n - i];
      out[n] = (u64)(acc % ell);
    } else {
      u64 acc = 0;
      for (std::size_t i = lo; i <= hi; ++i) acc = addmod(acc, mulmod(a[i], b[n - i], ell), ell);
      out[n] = acc;
    }
  }
  return out;
}

std::vector<u64> conv_mod_ntt(const std::vector<u64>& a, const std::vector<u64>& b,
                              u64 ell, std::size_t out_len) {
  if (a.empty() || b.empty()) return std::vector<u64>(out_len, 0);
  std::vector<u64> r[3];
#pragma omp parallel for schedule(static)
  for (int t = 0; t < 3; ++t) r[t] = conv_one_prime(a, b, out_len, NTT_P[t]);
  std::size_t m = r[0].size();
  std::vector<u64> out(out_len, 0);
  const u64 p0 = NTT_P[0], p1 = NTT_P[1], p2 = NTT_P[2];
  const u64 inv_p0_mod_p1 = invmod(p0 % p1, p1);
  const u64 inv_p0p1_mod_p2 = invmod(mulmod(p0 % p2, p1 % p2, p2), p2);
  for (std::size_t i = 0; i < m; ++i) {
    // Garner reconstruction of the true value, then reduce mod ell
    u64 x0 = r[0][i];
    u64 x1 = mulmod(submod(r[1][i], x0 % p1, p1), inv_p0_mod_p1, p1);
    u64 low = x0 + p0 * x1;  // < p0*p1 ~ 1e18, fits u64
    u64 x2 = mulmod(submod(r[2][i], low % p2, p2), inv_p0p1_mod_p2, p2);
    u128 val = (u128)p0 * p1 * x2 + low;
    out[i] = (u64)(val % ell);
  }
  return out;
}

std::vector<u64> conv_mod(const std::vector<u64>& a, const std::vector<u64>& b,
                          u64 ell, std::size_t out_len) {
  if (out_len == 0) return {};
  if (a.empty() || b.empty()) return std::vector<u64>(out_len, 0);
  // NTT pays off past a few hundred terms; below that schoolbook wins anyway
  if (out_len >= 256 && conv_ntt_applicable(ell, out_len)) return conv_mod_ntt(a, b, ell, out_len);
  return conv_mod_ref(a, b, ell, out_len);
}

}  // namespace modl
