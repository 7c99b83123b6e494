#include "modl/numring.hpp"

#include <algorithm>

#include "modl/errors.hpp"
#include "modl/intutil.hpp"

namespace modl {

namespace {

// m(r) for integer r
mpz_class eval_at_int(const std::vector<mpz_class>& m, const mpz_class& r) {
  mpz_class acc = 0;
  for (size_t i = m.size(); i-- > 0;) acc = acc * r + m[i];
  return acc;
}

// degree of m reduced mod p assuming monic input (stays full degree)
bool irreducible_mod_p(const std::vector<mpz_class>& m, u64 p) {
  // distinct-degree test: m irreducible over F_p iff x^(p^d) == x (mod m)
  // and gcd(x^(p^e) - x, m) = 1 for all proper e | d. Degrees here are tiny.
  unsigned d = (unsigned)m.size() - 1;
  std::vector<u64> mm(m.size());
  for (size_t i = 0; i < m.size(); ++i) {
    mpz_class c = m[i] % (long)p;
    if (c < 0) c += (long)p;
    mm[i] = c.get_ui();
  }
  if (mm.back() != 1) return false;  // degree dropped is impossible (monic), keep guard
  auto polymulmod = [&](const std::vector<u64>& a, const std::vector<u64>& b) {
    std::vector<u64> r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) r[i + j] = addmod(r[i + j], mulmod(a[i], b[j], p), p);
    // reduce mod mm
    for (size_t i = r.size(); i-- >= m.size() && i + 1 >= m.size();) {
      if (i + 1 < m.size()) break;
      u64 lead = r[i];
      if (lead) {
        for (size_t j = 0; j < m.size(); ++j)
          r[i - (m.size() - 1) + j] = submod(r[i - (m.size() - 1) + j], mulmod(lead, mm[j], p), p);
      }
      r.pop_back();
      if (r.size() < m.size()) break;
    }
    while (r.size() > 1 && r.back() == 0) r.pop_back();
    return r;
  };
  auto polypow_x = [&](mpz_class e) {
    // x^e mod (mm)
    std::vector<u64> base = {0, 1}, acc = {1};
    while (e > 0) {
      if (mpz_tstbit(e.get_mpz_t(), 0)) acc = polymulmod(acc, base);
      base = polymulmod(base, base);
      e >>= 1;
    }
    return acc;
  };
  auto polygcd_with_m = [&](std::vector<u64> a) {
    std::vector<u64> b = mm;
    while (!(a.size() == 1 && a[0] == 0)) {
      // b mod a
      std::vector<u64> r = b;
      if (a.back() == 0) break;
      u64 ainv = invmod(a.back(), p);
      while (r.size() >= a.size() && !(r.size() == 1 && r[0] == 0)) {
        u64 q = mulmod(r.back(), ainv, p);
        size_t off = r.size() - a.size();
        for (size_t j = 0; j < a.size(); ++j) r[off + j] = submod(r[off + j], mulmod(q, a[j], p), p);
        while (r.size() > 1 && r.back() == 0) r.pop_back();
        if (r.size() == 1 && r[0] == 0) break;
      }
      b = a;
      a = r;
    }
    return b;  // gcd up to unit
  };
  // square-free requirement first: gcd(m, m') constant
  std::vector<u64> dm(mm.size() - 1);
  for (size_t i = 1; i < mm.size(); ++i) dm[i - 1] = mulmod(mm[i], i % p, p);
  while (dm.size() > 1 && dm.back() == 0) dm.pop_back();
  if (dm.size() == 1 && dm[0] == 0) return false;
  if (polygcd_with_m(dm).size() > 1) return false;
  for (unsigned e = 1; e <= d / 2; ++e) {
    if (d % e) continue;
    mpz_class pe;
    mpz_ui_pow_ui(pe.get_mpz_t(), p, e);
    std::vector<u64> xe = polypow_x(pe);
    // x^(p^e) - x
    std::vector<u64> diff = xe;
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = submod(diff[1], 1, p);
    while (diff.size() > 1 && diff.back() == 0) diff.pop_back();
    if (diff.size() == 1 && diff[0] == 0) return false;  // splits into degree-e factors
    if (polygcd_with_m(diff).size() > 1) return false;
  }
  mpz_class pd;
  mpz_ui_pow_ui(pd.get_mpz_t(), p, d);
  std::vector<u64> xd = polypow_x(pd);
  std::vector<u64> diff = xd;
  if (diff.size() < 2) diff.resize(2, 0);
  diff[1] = submod(diff[1], 1, p);
  while (diff.size() > 1 && diff.back() == 0) diff.pop_back();
  return diff.size() == 1 && diff[0] == 0;
}

}  // namespace

NumberRing::NumberRing(std::vector<mpz_class> min_poly) : m_(std::move(min_poly)) {
  if (m_.size() < 2) throw NotMonic("minimal polynomial must have degree >= 1");
  if (m_.back() != 1) throw NotMonic("minimal polynomial must be monic, got leading " + m_.back().get_str());
  unsigned d = degree();
  if (d >= 2) {
    // rational-root test (complete reducibility test for monic degree <= 3):
    // integer roots divide the constant term
    if (m_[0] == 0) throw RationalRootFound("x = 0 is a root");
    std::vector<mpz_class> cands;
    try {
      auto f = factor_mpz(m_[0]);
      cands.push_back(1);
      for (auto& [p, e] : f) {
        size_t cur = cands.size();
        mpz_class pk = 1;
        for (unsigned i = 0; i < e; ++i) {
          pk *= p;
          for (size_t j = 0; j < cur; ++j) cands.push_back(cands[j] * pk);
        }
      }
    } catch (const MathError&) {
      // constant term too large to factor; test small candidates only
      for (mpz_class t = 1; t <= 100000; ++t)
        if (m_[0] % t == 0) cands.push_back(t);
    }
    for (auto& r : cands) {
      if (eval_at_int(m_, r) == 0) throw RationalRootFound("x = " + r.get_str());
      mpz_class nr = -r;
      if (eval_at_int(m_, nr) == 0) throw RationalRootFound("x = " + nr.get_str());
    }
    // opportunistic certificate: irreducible mod some small prime => irreducible over Q
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull,
                  31ull, 37ull, 41ull, 43ull, 47ull, 53ull, 59ull, 61ull, 67ull, 71ull}) {
      if (irreducible_mod_p(m_, p)) { certified_ = true; break; }
    }
  } else {
    certified_ = true;  // degree 1
  }
  // power reduction table: theta^d = -(c0 + ... + c_{d-1} theta^{d-1}), then up
  if (d >= 2) {
    std::vector<mpz_class> cur(d);
    for (unsigned i = 0; i < d; ++i) cur[i] = -m_[i];
    powred_.push_back(cur);
    for (unsigned j = 1; j + 1 < d; ++j) {
      std::vector<mpz_class> nxt(d, 0);
      // multiply cur by theta, reduce the overflow via powred_[0]
      mpz_class top = cur[d - 1];
      for (unsigned i = d - 1; i >= 1; --i) nxt[i] = cur[i - 1];
      nxt[0] = 0;
      for (unsigned i = 0; i < d; ++i) nxt[i] += top * powred_[0][i];
      powred_.push_back(nxt);
      cur = nxt;
    }
  }
}

RingPtr NumberRing::make(std::vector<mpz_class> min_poly) {
  return std::make_shared<const NumberRing>(std::move(min_poly));
}

RingPtr NumberRing::rationals() {
  static RingPtr q = make({0, 1});
  return q;
}

RingPtr NumberRing::quadratic(const mpz_class& D) { return make({-D, 0, 1}); }

void require_same_ring(const RingPtr& a, const RingPtr& b, const char* where) {
  if (!a || !b) throw RingMismatch(std::string(where) + ": null ring");
  if (a.get() == b.get()) return;
  if (!a->same_ring(*b)) throw RingMismatch(std::string(where) + ": elements from different rings");
}

RingElement::RingElement(RingPtr ring, std::vector<mpq_class> coords)
    : R_(std::move(ring)), c_(std::move(coords)) {
  if (!R_) throw RingMismatch("RingElement: null ring");
  if (c_.size() != R_->degree())
    throw RingMismatch("RingElement: coordinate count " + std::to_string(c_.size()) +
                       " != ring degree " + std::to_string(R_->degree()));
  for (auto& q : c_) q.canonicalize();
}

RingElement RingElement::zero(const RingPtr& R) {
  return RingElement(R, std::vector<mpq_class>(R->degree(), mpq_class(0)));
}

RingElement RingElement::one(const RingPtr& R) { return from_int(R, 1); }

RingElement RingElement::theta(const RingPtr& R) {
  if (R->degree() < 2) throw RingMismatch("theta: ring has degree 1");
  std::vector<mpq_class> c(R->degree(), mpq_class(0));
  c[1] = 1;
  return RingElement(R, std::move(c));
}

RingElement RingElement::from_rational(const RingPtr& R, const mpq_class& q) {
  std::vector<mpq_class> c(R->degree(), mpq_class(0));
  c[0] = q;
  return RingElement(R, std::move(c));
}

RingElement RingElement::from_int(const RingPtr& R, long v) {
  return from_rational(R, mpq_class(v));
}

bool RingElement::is_zero() const {
  for (auto& q : c_)
    if (q != 0) return false;
  return true;
}

bool RingElement::is_rational_value() const {
  for (size_t i = 1; i < c_.size(); ++i)
    if (c_[i] != 0) return false;
  return true;
}

const mpq_class& RingElement::rational_value() const {
  if (!is_rational_value()) throw RingMismatch("rational_value: element is not rational: " + to_string());
  return c_[0];
}

RingElement RingElement::operator-() const {
  RingElement r(*this);
  for (auto& q : r.c_) q = -q;
  return r;
}

RingElement RingElement::operator+(const RingElement& o) const {
  RingElement r(*this);
  r += o;
  return r;
}

RingElement RingElement::operator-(const RingElement& o) const {
  RingElement r(*this);
  r -= o;
  return r;
}

RingElement& RingElement::operator+=(const RingElement& o) {
  require_same_ring(R_, o.R_, "operator+");
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

RingElement& RingElement::operator-=(const RingElement& o) {
  require_same_ring(R_, o.R_, "operator-");
  for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

RingElement RingElement::operator*(const RingElement& o) const {
  require_same_ring(R_, o.R_, "operator*");
  unsigned d = R_->degree();
  std::vector<mpq_class> prod(2 * d - 1, mpq_class(0));
  for (unsigned i = 0; i < d; ++i) {
    if (c_[i] == 0) continue;
    for (unsigned j = 0; j < d; ++j) {
      if (o.c_[j] == 0) continue;
      prod[i + j] += c_[i] * o.c_[j];
    }
  }
  std::vector<mpq_class> out(prod.begin(), prod.begin() + d);
  const auto& red = R_->power_reductions();
  for (size_t idx = d; idx < prod.size(); ++idx) {
    if (prod[idx] == 0) continue;
    const auto& row = red[idx - d];  // theta^idx written in the power basis
    for (unsigned i = 0; i < d; ++i) out[i] += prod[idx] * row[i];
  }
  return RingElement(R_, std::move(out));
}

RingElement& RingElement::operator*=(const RingElement& o) {
  *this = *this * o;
  return *this;
}

RingElement RingElement::operator*(const mpq_class& s) const {
  RingElement r(*this);
  for (auto& q : r.c_) q *= s;
  return r;
}

RingElement RingElement::operator/(const RingElement& o) const { return *this * o.inverse(); }

bool RingElement::operator==(const RingElement& o) const {
  if (!R_ || !o.R_) return R_ == o.R_;
  if (!R_->same_ring(*o.R_)) return false;
  return c_ == o.c_;
}

namespace {

using QPoly = std::vector<mpq_class>;  // dense, low to high

void qp_trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

QPoly qp_mul(const QPoly& a, const QPoly& b) {
  if (a.empty() || b.empty()) return {};
  QPoly r(a.size() + b.size() - 1, mpq_class(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

QPoly qp_sub(QPoly a, const QPoly& b) {
  if (a.size() < b.size()) a.resize(b.size(), mpq_class(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  qp_trim(a);
  return a;
}

// a mod b, b nonzero
QPoly qp_rem(QPoly a, const QPoly& b) {
  qp_trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    mpq_class q = a.back() / b.back();
    size_t off = a.size() - b.size();
    for (size_t j = 0; j < b.size(); ++j) a[off + j] -= q * b[j];
    qp_trim(a);
  }
  return a;
}

}  // namespace

RingElement RingElement::inverse() const {
  if (is_zero()) throw NotInvertible("inverse of zero");
  unsigned d = R_->degree();
  if (d == 1) {
    return RingElement(R_, {mpq_class(1) / c_[0]});
  }
  // extended Euclid: u*e + v*m = gcd in Q[x]
  QPoly m(R_->min_poly().size());
  for (size_t i = 0; i < m.size(); ++i) m[i] = mpq_class(R_->min_poly()[i]);
  QPoly r0 = m, r1(c_.begin(), c_.end());
  qp_trim(r1);
  QPoly s0 = {}, s1 = {mpq_class(1)};  // coefficients of e
  while (!(r1.size() == 0)) {
    // quotient of r0 by r1
    QPoly q;
    QPoly rem = r0;
    q.assign(r0.size() >= r1.size() ? r0.size() - r1.size() + 1 : 1, mpq_class(0));
    while (rem.size() >= r1.size() && !rem.empty()) {
      mpq_class c = rem.back() / r1.back();
      size_t off = rem.size() - r1.size();
      q[off] += c;
      for (size_t j = 0; j < r1.size(); ++j) rem[off + j] -= c * r1[j];
      qp_trim(rem);
    }
    qp_trim(q);
    QPoly s2 = qp_sub(s0, qp_mul(q, s1));
    r0 = r1;
    r1 = rem;
    s0 = s1;
    s1 = s2;
  }
  if (r0.size() != 1)
    throw NotInvertible("element is a zero divisor (min poly not irreducible?): " + to_string());
  // r0 = s0*e + t*m = const; inverse = s0 / r0 reduced mod m
  for (auto& c : s0) c /= r0[0];
  QPoly inv = qp_rem(s0, m);
  inv.resize(d, mpq_class(0));
  return RingElement(R_, std::vector<mpq_class>(inv.begin(), inv.end()));
}

mpq_class RingElement::norm() const {
  unsigned d = R_->degree();
  if (d == 1) return c_[0];
  // multiplication matrix columns: this * theta^j in power basis
  std::vector<std::vector<mpq_class>> M(d, std::vector<mpq_class>(d));
  RingElement cur = *this;
  for (unsigned j = 0; j < d; ++j) {
    for (unsigned i = 0; i < d; ++i) M[i][j] = cur.coords()[i];
    if (j + 1 < d) cur = cur * RingElement::theta(R_);
  }
  // exact Gaussian elimination determinant
  mpq_class det = 1;
  for (unsigned col = 0; col < d; ++col) {
    unsigned piv = col;
    while (piv < d && M[piv][col] == 0) ++piv;
    if (piv == d) return 0;
    if (piv != col) {
      std::swap(M[piv], M[col]);
      det = -det;
    }
    det *= M[col][col];
    for (unsigned r = col + 1; r < d; ++r) {
      if (M[r][col] == 0) continue;
      mpq_class f = M[r][col] / M[col][col];
      for (unsigned cc = col; cc < d; ++cc) M[r][cc] -= f * M[col][cc];
    }
  }
  return det;
}

mpq_class RingElement::trace() const {
  unsigned d = R_->degree();
  mpq_class t = 0;
  RingElement cur = *this;
  for (unsigned j = 0; j < d; ++j) {
    t += cur.coords()[j];
    if (j + 1 < d) cur = cur * RingElement::theta(R_);
  }
  return t;
}

std::string RingElement::to_string() const {
  std::string s;
  bool first = true;
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    std::string term = mpq_to_string(c_[i]);
    if (i >= 1) term += "*th";
    if (i >= 2) term += "^" + std::to_string(i);
    if (!first && term[0] != '-') s += "+";
    s += term;
    first = false;
  }
  if (first) s = "0";
  return s;
}

}  // namespace modl
