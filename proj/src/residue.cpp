#include "modl/residue.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "modl/errors.hpp"

namespace modl {

// ---------- F_ell[x] helpers ----------

FpPoly fp_trim(FpPoly p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

FpPoly fp_add(const FpPoly& a, const FpPoly& b, u64 ell) {
  FpPoly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] = addmod(r[i], b[i], ell);
  return fp_trim(std::move(r));
}

FpPoly fp_sub(const FpPoly& a, const FpPoly& b, u64 ell) {
  FpPoly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] = submod(r[i], b[i], ell);
  return fp_trim(std::move(r));
}

FpPoly fp_mul(const FpPoly& a, const FpPoly& b, u64 ell) {
  if (a.empty() || b.empty()) return {};
  FpPoly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = addmod(r[i + j], mulmod(a[i], b[j], ell), ell);
  }
  return fp_trim(std::move(r));
}

FpPoly fp_rem(FpPoly a, const FpPoly& b, u64 ell) {
  if (b.empty()) throw InternalCheckError("fp_rem: division by zero polynomial");
  a = fp_trim(std::move(a));
  u64 lead_inv = invmod(b.back(), ell);
  while (a.size() >= b.size()) {
    u64 q = mulmod(a.back(), lead_inv, ell);
    size_t shift = a.size() - b.size();
    if (q != 0)
      for (size_t i = 0; i < b.size(); ++i)
        a[shift + i] = submod(a[shift + i], mulmod(q, b[i], ell), ell);
    a.pop_back();
    while (!a.empty() && a.back() == 0) a.pop_back();
  }
  return a;
}

FpPoly fp_monic(FpPoly p, u64 ell) {
  p = fp_trim(std::move(p));
  if (p.empty() || p.back() == 1) return p;
  u64 inv = invmod(p.back(), ell);
  for (auto& c : p) c = mulmod(c, inv, ell);
  return p;
}

FpPoly fp_gcd(FpPoly a, FpPoly b, u64 ell) {
  a = fp_trim(std::move(a));
  b = fp_trim(std::move(b));
  while (!b.empty()) {
    FpPoly r = fp_rem(a, b, ell);
    a = std::move(b);
    b = std::move(r);
  }
  return fp_monic(std::move(a), ell);
}

FpPoly fp_derivative(const FpPoly& p, u64 ell) {
  if (p.size() <= 1) return {};
  FpPoly r(p.size() - 1, 0);
  for (size_t i = 1; i < p.size(); ++i) r[i - 1] = mulmod(p[i], i % ell, ell);
  return fp_trim(std::move(r));
}

FpPoly fp_pow_mod(FpPoly base, mpz_class e, const FpPoly& mod, u64 ell) {
  FpPoly result{1};
  base = fp_rem(std::move(base), mod, ell);
  size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  if (e == 0) return result;
  for (size_t i = bits; i-- > 0;) {
    result = fp_rem(fp_mul(result, result, ell), mod, ell);
    if (mpz_tstbit(e.get_mpz_t(), i))
      result = fp_rem(fp_mul(result, base, ell), mod, ell);
  }
  return result;
}

namespace {

FpPoly fp_divexact(const FpPoly& a, const FpPoly& b, u64 ell) {
  // quotient when b | a
  FpPoly rem = fp_trim(a);
  if (rem.empty()) return {};
  FpPoly q(rem.size() - b.size() + 1, 0);
  u64 lead_inv = invmod(b.back(), ell);
  while (rem.size() >= b.size()) {
    u64 c = mulmod(rem.back(), lead_inv, ell);
    size_t shift = rem.size() - b.size();
    q[shift] = c;
    if (c != 0)
      for (size_t i = 0; i < b.size(); ++i)
        rem[shift + i] = submod(rem[shift + i], mulmod(c, b[i], ell), ell);
    rem.pop_back();
    while (!rem.empty() && rem.back() == 0) rem.pop_back();
  }
  if (!rem.empty()) throw InternalCheckError("fp_divexact: nonzero remainder");
  return fp_trim(std::move(q));
}

// trace map r + r^ell + ... + r^(ell^(d-1)) mod f, used for equal-degree splitting
FpPoly fp_trace_map(const FpPoly& r, unsigned d, const FpPoly& f, u64 ell) {
  FpPoly acc = fp_rem(r, f, ell);
  FpPoly pw = acc;
  for (unsigned i = 1; i < d; ++i) {
    pw = fp_pow_mod(pw, mpz_class(ell), f, ell);
    acc = fp_add(acc, pw, ell);
  }
  return acc;
}

// split a monic product of irreducibles all of degree d (Cantor-Zassenhaus)
void fp_equal_degree(const FpPoly& f, unsigned d, u64 ell, std::mt19937_64& rng,
                     std::vector<FpPoly>& out) {
  unsigned deg = static_cast<unsigned>(f.size()) - 1;
  if (deg == d) {
    out.push_back(f);
    return;
  }
  mpz_class qd;
  mpz_ui_pow_ui(qd.get_mpz_t(), ell, d);
  mpz_class half = (qd - 1) / 2;
  for (;;) {
    FpPoly r(deg, 0);
    for (auto& c : r) c = rng() % ell;
    r = fp_trim(std::move(r));
    if (r.empty()) continue;
    FpPoly s;
    if (ell == 2) {
      s = fp_trace_map(r, d, f, ell);
    } else {
      s = fp_pow_mod(r, half, f, ell);
      if (s.empty()) continue;
      s[0] = submod(s[0], 1, ell);
      s = fp_trim(std::move(s));
    }
    FpPoly g = fp_gcd(s, f, ell);
    if (g.size() <= 1 || g.size() == f.size()) continue;
    fp_equal_degree(g, d, ell, rng, out);
    fp_equal_degree(fp_divexact(f, g, ell), d, ell, rng, out);
    return;
  }
}

}  // namespace

std::vector<FpPoly> fp_factor(const FpPoly& f_in, u64 ell) {
  FpPoly f = fp_monic(f_in, ell);
  if (f.size() <= 1) throw InternalCheckError("fp_factor: constant polynomial");
  std::vector<FpPoly> out;
  // distinct-degree stage
  std::mt19937_64 rng(0x5eed1234abcdULL);  // fixed seed: deterministic output order
  FpPoly x{0, 1};
  FpPoly w = fp_rem(x, f, ell);
  unsigned d = 0;
  while (f.size() > 1) {
    ++d;
    if (2 * d > f.size() - 1) {
      // remainder is irreducible
      out.push_back(f);
      break;
    }
    w = fp_pow_mod(w, mpz_class(ell), f, ell);
    FpPoly g = fp_gcd(fp_sub(w, x, ell), f, ell);
    if (g.size() > 1) {
      fp_equal_degree(g, d, ell, rng, out);
      f = fp_divexact(f, g, ell);
      w = fp_rem(w, f, ell);
    }
  }
  std::sort(out.begin(), out.end(), [](const FpPoly& a, const FpPoly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = a.size(); i-- > 0;)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  });
  return out;
}

// ---------- ResidueMap ----------

ResidueMap::ResidueMap(RingPtr ring, u64 ell, FpPoly g, unsigned index)
    : ring_(std::move(ring)), ell_(ell), g_(std::move(g)),
      h_(static_cast<unsigned>(g_.size()) - 1), index_(index) {
  // x^(h+j) mod g table for products
  if (h_ >= 2) {
    FpPoly cur(h_ + 1, 0);
    cur[h_] = 1;
    cur = fp_rem(std::move(cur), g_, ell_);
    for (unsigned j = 0; j + 1 < h_; ++j) {
      std::vector<u64> row(h_, 0);
      for (size_t i = 0; i < cur.size(); ++i) row[i] = cur[i];
      powred_.push_back(std::move(row));
      cur = fp_rem(fp_mul(cur, FpPoly{0, 1}, ell_), g_, ell_);
    }
  }
}

std::vector<ResidueMapPtr> ResidueMap::primes_above(const RingPtr& ring, u64 ell) {
  if (!ring) throw SchemaError("primes_above: null ring");
  if (ell >= (u64(1) << 62)) throw SchemaError("primes_above: ell too large for word arithmetic");
  if (!is_prime_u64(ell)) throw SchemaError("primes_above: ell = " + std::to_string(ell) + " is not prime");
  unsigned d = ring->degree();
  FpPoly mbar(d + 1, 0);
  for (unsigned i = 0; i <= d; ++i)
    mbar[i] = mpz_fdiv_ui(ring->min_poly()[i].get_mpz_t(), ell);
  mbar = fp_trim(std::move(mbar));
  if (mbar.size() != d + 1)
    throw InternalCheckError("primes_above: monic minpoly degenerated mod ell");
  FpPoly der = fp_derivative(mbar, ell);
  FpPoly sf = fp_gcd(mbar, der, ell);
  if (sf.size() != 1)
    throw NotSquareFreeModEll("minimal polynomial is not square-free mod " + std::to_string(ell));
  std::vector<FpPoly> factors = fp_factor(mbar, ell);
  unsigned total = 0;
  for (const auto& g : factors) total += static_cast<unsigned>(g.size()) - 1;
  if (total != d) throw InternalCheckError("primes_above: factor degrees do not sum to ring degree");
  std::vector<ResidueMapPtr> maps;
  for (unsigned i = 0; i < factors.size(); ++i)
    maps.push_back(ResidueMapPtr(new ResidueMap(ring, ell, factors[i], i)));
  return maps;
}

bool ResidueMap::same_map(const ResidueMap& o) const {
  return ell_ == o.ell_ && g_ == o.g_ && ring_->same_ring(*o.ring_);
}

void require_same_map(const ResidueMapPtr& a, const ResidueMapPtr& b, const char* what) {
  if (!a || !b || !a->same_map(*b))
    throw RingMismatch(std::string(what) + ": operands belong to different residue fields");
}

ResidueElt ResidueMap::zero() const {
  return ResidueElt(shared_from_this(), std::vector<u64>(h_, 0));
}

ResidueElt ResidueMap::one() const { return from_u64(1 % ell_); }

ResidueElt ResidueMap::from_u64(u64 v) const {
  std::vector<u64> c(h_, 0);
  c[0] = v % ell_;
  return ResidueElt(shared_from_this(), std::move(c));
}

ResidueElt ResidueMap::from_mpz(const mpz_class& v) const {
  std::vector<u64> c(h_, 0);
  c[0] = mpz_fdiv_ui(v.get_mpz_t(), ell_);
  return ResidueElt(shared_from_this(), std::move(c));
}

ResidueElt ResidueMap::from_mpq(const mpq_class& v) const {
  u64 den = mpz_fdiv_ui(v.get_den().get_mpz_t(), ell_);
  if (den == 0)
    throw DenominatorNotCoprime("denominator " + v.get_den().get_str() +
                                " shares a factor with " + std::to_string(ell_));
  u64 num = mpz_fdiv_ui(v.get_num().get_mpz_t(), ell_);
  return from_u64(mulmod(num, invmod(den, ell_), ell_));
}

ResidueElt ResidueMap::from_coords(std::vector<u64> c) const {
  if (c.size() != h_) throw InternalCheckError("from_coords: wrong length");
  for (auto& v : c) v %= ell_;
  return ResidueElt(shared_from_this(), std::move(c));
}

ResidueElt ResidueMap::reduce(const RingElement& e) const {
  if (!e.ring() || !e.ring()->same_ring(*ring_)) {
    // rationals embed in every ring, so reducing them is unambiguous
    if (e.ring() && e.is_rational_value()) return from_mpq(e.rational_value());
    throw RingMismatch("reduce: element belongs to a different ring");
  }
  unsigned d = ring_->degree();
  FpPoly poly(d, 0);
  for (unsigned i = 0; i < d; ++i) {
    const mpq_class& q = e.coords()[i];
    u64 den = mpz_fdiv_ui(q.get_den().get_mpz_t(), ell_);
    if (den == 0)
      throw DenominatorNotCoprime("coordinate " + std::to_string(i) + " denominator " +
                                  q.get_den().get_str() + " is divisible by " +
                                  std::to_string(ell_));
    u64 num = mpz_fdiv_ui(q.get_num().get_mpz_t(), ell_);
    poly[i] = mulmod(num, invmod(den, ell_), ell_);
  }
  poly = fp_rem(fp_trim(std::move(poly)), g_, ell_);
  std::vector<u64> c(h_, 0);
  for (size_t i = 0; i < poly.size(); ++i) c[i] = poly[i];
  return ResidueElt(shared_from_this(), std::move(c));
}

RingElement ResidueMap::lift(const ResidueElt& e) const {
  if (!e.map() || !e.map()->same_map(*this))
    throw RingMismatch("lift: element belongs to a different residue field");
  std::vector<mpq_class> coords(ring_->degree(), mpq_class(0));
  for (unsigned i = 0; i < h_; ++i) coords[i] = mpq_class(mpz_class(e.coords()[i]));
  return RingElement(ring_, std::move(coords));
}

void ResidueMap::fq_add(const u64* a, const u64* b, u64* out) const {
  for (unsigned i = 0; i < h_; ++i) out[i] = addmod(a[i], b[i], ell_);
}

void ResidueMap::fq_sub(const u64* a, const u64* b, u64* out) const {
  for (unsigned i = 0; i < h_; ++i) out[i] = submod(a[i], b[i], ell_);
}

void ResidueMap::fq_mul(const u64* a, const u64* b, u64* out) const {
  if (h_ == 1) {
    out[0] = mulmod(a[0], b[0], ell_);
    return;
  }
  std::vector<u64> prod(2 * h_ - 1, 0);
  for (unsigned i = 0; i < h_; ++i) {
    if (a[i] == 0) continue;
    for (unsigned j = 0; j < h_; ++j)
      prod[i + j] = addmod(prod[i + j], mulmod(a[i], b[j], ell_), ell_);
  }
  for (unsigned i = 0; i < h_; ++i) out[i] = prod[i];
  for (unsigned j = 0; j + 1 < h_; ++j) {
    u64 c = prod[h_ + j];
    if (c == 0) continue;
    for (unsigned i = 0; i < h_; ++i)
      out[i] = addmod(out[i], mulmod(c, powred_[j][i], ell_), ell_);
  }
}

std::string ResidueMap::label() const {
  std::ostringstream os;
  os << ell_ << ":(";
  bool first = true;
  for (size_t i = g_.size(); i-- > 0;) {
    if (g_[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0 || g_[i] != 1) os << g_[i];
    if (i >= 1) {
      if (g_[i] != 1) os << "*";
      os << "x";
      if (i >= 2) os << "^" << i;
    }
  }
  os << ")";
  return os.str();
}

std::vector<ResidueMapPtr> primes_above(const RingPtr& ring, u64 ell) {
  return ResidueMap::primes_above(ring, ell);
}

// ---------- ResidueElt ----------

ResidueElt::ResidueElt(ResidueMapPtr map, std::vector<u64> coords)
    : map_(std::move(map)), c_(std::move(coords)) {
  if (!map_ || c_.size() != map_->inertia())
    throw InternalCheckError("ResidueElt: coordinate length mismatch");
}

bool ResidueElt::is_zero() const {
  for (u64 v : c_)
    if (v != 0) return false;
  return true;
}

ResidueElt ResidueElt::operator+(const ResidueElt& o) const {
  require_same_map(map_, o.map_, "operator+");
  std::vector<u64> r(c_.size());
  map_->fq_add(c_.data(), o.c_.data(), r.data());
  return ResidueElt(map_, std::move(r));
}

ResidueElt ResidueElt::operator-(const ResidueElt& o) const {
  require_same_map(map_, o.map_, "operator-");
  std::vector<u64> r(c_.size());
  map_->fq_sub(c_.data(), o.c_.data(), r.data());
  return ResidueElt(map_, std::move(r));
}

ResidueElt ResidueElt::operator-() const {
  std::vector<u64> r(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) r[i] = c_[i] == 0 ? 0 : map_->ell() - c_[i];
  return ResidueElt(map_, std::move(r));
}

ResidueElt ResidueElt::operator*(const ResidueElt& o) const {
  require_same_map(map_, o.map_, "operator*");
  std::vector<u64> r(c_.size());
  map_->fq_mul(c_.data(), o.c_.data(), r.data());
  return ResidueElt(map_, std::move(r));
}

ResidueElt ResidueElt::operator/(const ResidueElt& o) const { return *this * o.inverse(); }

ResidueElt& ResidueElt::operator+=(const ResidueElt& o) { return *this = *this + o; }
ResidueElt& ResidueElt::operator-=(const ResidueElt& o) { return *this = *this - o; }
ResidueElt& ResidueElt::operator*=(const ResidueElt& o) { return *this = *this * o; }

bool ResidueElt::operator==(const ResidueElt& o) const {
  if (!map_ || !o.map_) return map_ == o.map_;
  return map_->same_map(*o.map_) && c_ == o.c_;
}

ResidueElt ResidueElt::inverse() const {
  if (is_zero()) throw NotInvertible("inverse of zero in residue field");
  u64 ell = map_->ell();
  // extended Euclid in F_ell[x] against g
  FpPoly r0 = map_->factor();
  FpPoly r1 = fp_trim(FpPoly(c_));
  FpPoly s0 = {};      // coefficient of the element for r0
  FpPoly s1 = {1};     // ... for r1
  while (!r1.empty()) {
    // r0 = q*r1 + r2
    FpPoly q;
    {
      FpPoly a = r0;
      u64 lead_inv = invmod(r1.back(), ell);
      q.assign(a.size() >= r1.size() ? a.size() - r1.size() + 1 : 0, 0);
      while (a.size() >= r1.size()) {
        u64 c = mulmod(a.back(), lead_inv, ell);
        size_t shift = a.size() - r1.size();
        q[shift] = c;
        if (c != 0)
          for (size_t i = 0; i < r1.size(); ++i)
            a[shift + i] = submod(a[shift + i], mulmod(c, r1[i], ell), ell);
        a.pop_back();
        while (!a.empty() && a.back() == 0) a.pop_back();
      }
      r0 = std::move(r1);
      r1 = std::move(a);
    }
    FpPoly s2 = fp_sub(s0, fp_mul(q, s1, ell), ell);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  // r0 is the gcd; it must be a nonzero constant since g is irreducible and elt nonzero
  if (r0.size() != 1) throw InternalCheckError("inverse: gcd with irreducible factor nonconstant");
  u64 scale = invmod(r0[0], ell);
  FpPoly inv = fp_rem(s0, map_->factor(), ell);
  std::vector<u64> out(c_.size(), 0);
  for (size_t i = 0; i < inv.size(); ++i) out[i] = mulmod(inv[i], scale, ell);
  return ResidueElt(map_, std::move(out));
}

ResidueElt ResidueElt::pow(const mpz_class& e) const {
  if (e < 0) return inverse().pow(-e);
  ResidueElt result = map_->one();
  if (e == 0) return result;
  ResidueElt base = *this;
  size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (size_t i = bits; i-- > 0;) {
    result = result * result;
    if (mpz_tstbit(e.get_mpz_t(), i)) result = result * base;
  }
  return result;
}

std::string ResidueElt::to_string() const {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < c_.size(); ++i) {
    if (i) os << ",";
    os << c_[i];
  }
  os << "]";
  return os.str();
}

}  // namespace modl
