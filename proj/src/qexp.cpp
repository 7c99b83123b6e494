#include "modl/qexp.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "modl/conv.hpp"
#include "modl/errors.hpp"
#include "modl/jsonio.hpp"

namespace modl {

// ---------- DirichletCharacter ----------

DirichletCharacter::DirichletCharacter() : ring_(NumberRing::rationals()) {}

DirichletCharacter DirichletCharacter::trivial(long long modulus) {
  if (modulus < 1) throw SchemaError("character modulus must be >= 1");
  DirichletCharacter chi;
  chi.kind_ = Kind::Trivial;
  chi.q_ = modulus;
  chi.ring_ = NumberRing::rationals();
  return chi;
}

DirichletCharacter DirichletCharacter::kronecker(const mpz_class& D) {
  if (D == 0) throw SchemaError("kronecker character needs D != 0");
  unsigned long r = mpz_fdiv_ui(D.get_mpz_t(), 4);
  if (r == 2 || r == 3)
    throw MultiplicativityViolation("kronecker symbol (D/.) is periodic mod |D| only for D = 0, 1 mod 4; got D = " +
                                    D.get_str());
  DirichletCharacter chi;
  chi.kind_ = Kind::Kronecker;
  chi.D_ = D;
  mpz_class q = abs(D);
  if (!q.fits_slong_p()) throw SchemaError("kronecker modulus too large");
  chi.q_ = q.get_si();
  chi.ring_ = NumberRing::rationals();
  return chi;
}

DirichletCharacter DirichletCharacter::table(long long modulus, RingPtr ring,
                                             std::vector<RingElement> values) {
  if (modulus < 1) throw SchemaError("character modulus must be >= 1");
  if ((long long)values.size() != modulus)
    throw SchemaError("character table needs exactly q values, got " +
                      std::to_string(values.size()));
  for (const auto& v : values) require_same_ring(ring, v.ring(), "character table");
  DirichletCharacter chi;
  chi.kind_ = Kind::Table;
  chi.q_ = modulus;
  chi.ring_ = std::move(ring);
  chi.values_ = std::move(values);
  const auto& vals = chi.values_;
  auto at = [&](long long a) -> const RingElement& { return vals[((a % modulus) + modulus) % modulus]; };
  // support condition: chi(a) = 0 iff gcd(a, q) > 1
  for (long long a = 0; a < modulus; ++a) {
    bool unit = std::gcd(a, modulus) == 1;
    if (unit == at(a).is_zero())
      throw MultiplicativityViolation("chi(" + std::to_string(a) + ") " +
                                      (unit ? "vanishes on a unit" : "is nonzero on a non-unit"));
  }
  if (at(1) != RingElement::one(chi.ring_))
    throw MultiplicativityViolation("chi(1) != 1");
  // multiplicativity: full check for small moduli, random sampling otherwise
  auto check = [&](long long a, long long b) {
    if (at((a * b) % modulus) != at(a) * at(b))
      throw MultiplicativityViolation("chi(" + std::to_string(a) + "*" + std::to_string(b) +
                                      ") != chi(a)chi(b)");
  };
  if (modulus <= 200) {
    for (long long a = 0; a < modulus; ++a)
      for (long long b = a; b < modulus; ++b) check(a, b);
  } else {
    std::mt19937_64 rng(0xc4a11edULL);
    for (int i = 0; i < 2000; ++i) check((long long)(rng() % modulus), (long long)(rng() % modulus));
  }
  return chi;
}

RingElement DirichletCharacter::value(long long a) const {
  long long r = ((a % q_) + q_) % q_;
  switch (kind_) {
    case Kind::Trivial:
      return std::gcd(r, q_) == 1 ? RingElement::one(ring_) : RingElement::zero(ring_);
    case Kind::Kronecker: {
      int s = mpz_kronecker_si(D_.get_mpz_t(), r);
      return RingElement::from_int(ring_, s);
    }
    case Kind::Table:
      return values_[r];
  }
  throw InternalCheckError("character kind");
}

bool DirichletCharacter::rational_valued() const {
  return kind_ != Kind::Table || ring_->is_rational();
}

RingElement DirichletCharacter::value_in(const RingPtr& R, long long a) const {
  if (ring_->same_ring(*R)) return value(a);
  if (rational_valued()) {
    RingElement v = value(a);
    return v.is_zero() ? RingElement::zero(R) : RingElement::from_rational(R, v.rational_value());
  }
  throw CharacterMismatch("character values live in a different ring than the coefficients");
}

mpq_class DirichletCharacter::rational_value(long long a) const {
  RingElement v = value(a);
  if (!v.is_rational_value())
    throw RingMismatch("character value at " + std::to_string(a) + " is not rational");
  return v.rational_value();
}

bool DirichletCharacter::is_odd() const {
  if (q_ <= 2) return false;  // chi(-1) = chi(1) = 1
  return value(q_ - 1) == -RingElement::one(ring_);
}

bool DirichletCharacter::same_character(const DirichletCharacter& o) const {
  if (kind_ == Kind::Trivial && o.kind_ == Kind::Trivial) return true;  // moduli may differ
  if (kind_ != o.kind_) return false;
  if (kind_ == Kind::Kronecker) return D_ == o.D_;
  return q_ == o.q_ && values_ == o.values_;
}

DirichletCharacter DirichletCharacter::operator*(const DirichletCharacter& o) const {
  if (kind_ == Kind::Trivial && o.kind_ == Kind::Trivial)
    return trivial(std::lcm(q_, o.q_));
  if (kind_ == Kind::Trivial) {
    if (o.q_ % q_ == 0 || q_ == 1) return o;
  }
  if (o.kind_ == Kind::Trivial) {
    if (q_ % o.q_ == 0 || o.q_ == 1) return *this;
  }
  if (kind_ == Kind::Kronecker && o.kind_ == Kind::Kronecker) {
    if (D_ == o.D_) return trivial(q_);  // quadratic squared
    return kronecker(D_ * o.D_);
  }
  // fall back to an explicit table over the lcm
  long long q = std::lcm(q_, o.q_);
  if (q > 1'000'000) throw SchemaError("character product modulus too large: " + std::to_string(q));
  RingPtr R = ring_;
  if (ring_->is_rational() && !o.ring_->is_rational()) R = o.ring_;
  if (!ring_->is_rational() && !o.ring_->is_rational())
    require_same_ring(ring_, o.ring_, "character product");
  auto embed = [&](const RingElement& v) {
    if (v.ring()->same_ring(*R)) return v;
    return RingElement::from_rational(R, v.rational_value());
  };
  std::vector<RingElement> vals;
  vals.reserve(q);
  for (long long a = 0; a < q; ++a) vals.push_back(embed(value(a)) * embed(o.value(a)));
  return table(q, R, std::move(vals));
}

std::string DirichletCharacter::name() const {
  switch (kind_) {
    case Kind::Trivial: return "trivial";
    case Kind::Kronecker: return "kronecker:" + D_.get_str();
    case Kind::Table: return "table mod " + std::to_string(q_);
  }
  return "?";
}

// ---------- QExpansion ----------

QExpansion::QExpansion(int weight, long long level, DirichletCharacter chi, RingPtr ring,
                       std::vector<RingElement> coeffs)
    : k_(weight), N_(level), chi_(std::move(chi)), ring_(std::move(ring)), c_(std::move(coeffs)) {
  if (N_ < 1) throw SchemaError("level must be >= 1");
  if (c_.empty()) throw SchemaError("a q-expansion stores at least a(0)");
  for (const auto& v : c_) require_same_ring(ring_, v.ring(), "QExpansion coefficients");
}

QExpansion QExpansion::zero(int weight, long long level, const RingPtr& ring, long long precision) {
  if (precision < 0) throw SchemaError("precision must be >= 0");
  std::vector<RingElement> c(precision + 1, RingElement::zero(ring));
  return QExpansion(weight, level, DirichletCharacter::trivial(level), ring, std::move(c));
}

const RingElement& QExpansion::a(long long n) const {
  if (n < 0) throw InternalCheckError("coefficient index below 0");
  if (n >= (long long)c_.size())
    throw PrecisionTooLow("coefficient a(" + std::to_string(n) + ") requested, stored up to " +
                          std::to_string(precision()));
  return c_[n];
}

RingElement QExpansion::a_at(const mpq_class& x) const {
  // dilated series have no coefficient at fractional indices: the value is 0
  if (x.get_den() != 1 || x < 0) return RingElement::zero(ring_);
  mpz_class n = x.get_num();
  if (n > (long)precision())
    throw PrecisionTooLow("coefficient a(" + n.get_str() + ") requested, stored up to " +
                          std::to_string(precision()));
  return c_[n.get_si()];
}

void QExpansion::set(long long n, RingElement v) {
  require_same_ring(ring_, v.ring(), "QExpansion::set");
  if (n < 0 || n >= (long long)c_.size()) throw InternalCheckError("set out of range");
  c_[n] = std::move(v);
}

bool QExpansion::is_zero() const {
  for (const auto& v : c_)
    if (!v.is_zero()) return false;
  return true;
}

namespace {
void require_addable(const QExpansion& f, const QExpansion& g) {
  require_same_ring(f.ring(), g.ring(), "q-expansion add");
  if (f.weight() != g.weight())
    throw WeightMismatch("adding weight " + std::to_string(f.weight()) + " to weight " +
                         std::to_string(g.weight()));
  if (!f.character().same_character(g.character()))
    throw CharacterMismatch("adding " + f.character().name() + " to " + g.character().name());
}
}  // namespace

QExpansion QExpansion::operator+(const QExpansion& g) const {
  require_addable(*this, g);
  long long B = std::min(precision(), g.precision());
  std::vector<RingElement> c;
  c.reserve(B + 1);
  for (long long n = 0; n <= B; ++n) c.push_back(c_[n] + g.c_[n]);
  return QExpansion(k_, std::lcm(N_, g.N_), chi_, ring_, std::move(c));
}

QExpansion QExpansion::operator-(const QExpansion& g) const {
  require_addable(*this, g);
  long long B = std::min(precision(), g.precision());
  std::vector<RingElement> c;
  c.reserve(B + 1);
  for (long long n = 0; n <= B; ++n) c.push_back(c_[n] - g.c_[n]);
  return QExpansion(k_, std::lcm(N_, g.N_), chi_, ring_, std::move(c));
}

QExpansion QExpansion::operator-() const {
  QExpansion r(*this);
  for (auto& v : r.c_) v = -v;
  return r;
}

QExpansion QExpansion::scalar_mul(const RingElement& s) const {
  require_same_ring(ring_, s.ring(), "scalar_mul");
  QExpansion r(*this);
  for (auto& v : r.c_) v = v * s;
  return r;
}

QExpansion QExpansion::scalar_mul(const mpq_class& s) const {
  QExpansion r(*this);
  for (auto& v : r.c_) v = v * s;
  return r;
}

QExpansion QExpansion::operator*(const QExpansion& g) const {
  require_same_ring(ring_, g.ring(), "q-expansion mul");
  long long B = std::min(precision(), g.precision());
  std::vector<RingElement> c(B + 1, RingElement::zero(ring_));
#pragma omp parallel for schedule(dynamic, 16)
  for (long long n = 0; n <= B; ++n) {
    RingElement acc = RingElement::zero(ring_);
    long long lo = std::max<long long>(0, n - g.precision());
    long long hi = std::min<long long>(n, precision());
    for (long long i = lo; i <= hi; ++i) {
      if (c_[i].is_zero() || g.c_[n - i].is_zero()) continue;
      acc += c_[i] * g.c_[n - i];
    }
    c[n] = std::move(acc);
  }
  return QExpansion(k_ + g.k_, std::lcm(N_, g.N_), chi_ * g.chi_, ring_, std::move(c));
}

QExpansion QExpansion::mul_serial(const QExpansion& g) const {
  require_same_ring(ring_, g.ring(), "q-expansion mul");
  long long B = std::min(precision(), g.precision());
  std::vector<RingElement> c(B + 1, RingElement::zero(ring_));
  for (long long n = 0; n <= B; ++n) {
    RingElement acc = RingElement::zero(ring_);
    long long lo = std::max<long long>(0, n - g.precision());
    long long hi = std::min<long long>(n, precision());
    for (long long i = lo; i <= hi; ++i) {
      if (c_[i].is_zero() || g.c_[n - i].is_zero()) continue;
      acc += c_[i] * g.c_[n - i];
    }
    c[n] = std::move(acc);
  }
  return QExpansion(k_ + g.k_, std::lcm(N_, g.N_), chi_ * g.chi_, ring_, std::move(c));
}

QExpansion QExpansion::pow_u(unsigned e) const {
  if (e == 0) {
    QExpansion r = zero(0, N_, ring_, precision());
    r.set(0, RingElement::one(ring_));
    return r;
  }
  QExpansion r(*this);
  for (unsigned i = 1; i < e; ++i) r = r * *this;
  return r;
}

QExpansion QExpansion::hecke_Tp(u64 p) const {
  if (!is_prime_u64(p)) throw MathError("hecke_Tp: " + std::to_string(p) + " is not prime");
  if (precision() < (long long)p)
    throw PrecisionTooLow("T_" + std::to_string(p) + " needs precision >= " + std::to_string(p) +
                          ", have " + std::to_string(precision()));
  long long B = precision() / (long long)p;
  mpz_class pk1;
  mpz_ui_pow_ui(pk1.get_mpz_t(), p, k_ >= 1 ? k_ - 1 : 0);
  RingElement s = chi_.value_in(ring_, (long long)p) * mpq_class(pk1);
  std::vector<RingElement> c;
  c.reserve(B + 1);
  for (long long n = 0; n <= B; ++n) {
    RingElement v = c_[n * (long long)p];
    if (n % (long long)p == 0 && !s.is_zero()) v += s * c_[n / (long long)p];
    c.push_back(std::move(v));
  }
  return QExpansion(k_, N_, chi_, ring_, std::move(c));
}

QExpansion QExpansion::b_delta(u64 delta) const {
  if (delta == 0) throw SchemaError("b_delta: delta must be >= 1");
  if (delta == 1) return *this;
  long long B = precision();
  std::vector<RingElement> c(B + 1, RingElement::zero(ring_));
  for (long long n = 0; n * (long long)delta <= B; ++n) c[n * (long long)delta] = c_[n];
  long long newN = N_ * (long long)delta;
  DirichletCharacter chi = chi_.is_principal() ? DirichletCharacter::trivial(newN) : chi_;
  return QExpansion(k_, newN, chi, ring_, std::move(c));
}

QExpansion QExpansion::coprime_part(u64 M) const {
  if (M == 0) throw SchemaError("coprime_part: M must be >= 1");
  long long B = precision();
  std::vector<RingElement> c;
  c.reserve(B + 1);
  for (long long n = 0; n <= B; ++n)
    c.push_back(std::gcd((u64)n, M) == 1 ? c_[n] : RingElement::zero(ring_));
  long long newN = ((long long)M == N_) ? N_ * N_ : N_ * (long long)(M * M);
  DirichletCharacter chi = chi_.is_principal() ? DirichletCharacter::trivial(newN) : chi_;
  return QExpansion(k_, newN, chi, ring_, std::move(c));
}

QExpansion QExpansion::truncate(long long B) const {
  if (B < 0 || B > precision())
    throw PrecisionTooLow("truncate to " + std::to_string(B) + " from " +
                          std::to_string(precision()));
  std::vector<RingElement> c(c_.begin(), c_.begin() + B + 1);
  return QExpansion(k_, N_, chi_, ring_, std::move(c));
}

QExpansion QExpansion::with_weight(int k) const {
  QExpansion r(*this);
  r.k_ = k;
  return r;
}

std::string QExpansion::to_string(long long upto) const {
  std::ostringstream os;
  bool any = false;
  for (long long n = 0; n <= std::min(upto, precision()); ++n) {
    if (c_[n].is_zero()) continue;
    if (any) os << " + ";
    os << "(" << c_[n].to_string() << ")";
    if (n >= 1) os << "q";
    if (n >= 2) os << "^" << n;
    any = true;
  }
  if (!any) os << "0";
  os << " + O(q^" << precision() + 1 << ")";
  return os.str();
}

// ---------- Sturm bound ----------

mpz_class gamma1_index(const mpz_class& N) {
  if (N < 1) throw SchemaError("level must be >= 1");
  if (N == 1) return 1;
  if (N == 2) return 3;
  auto fac = factor_mpz(N);
  mpz_class rad = 1, prod = 1;
  for (auto& [p, e] : fac) {
    rad *= p;
    prod *= p * p - 1;
  }
  mpz_class cofactor = N / rad;
  return cofactor * cofactor * prod;
}

mpz_class sturm_bound_1(long long k, const mpz_class& N) {
  if (k < 1) throw SchemaError("weight must be >= 1");
  return ceil_div(mpz_class((long)k) * gamma1_index(N), 12);
}

bool congruent_upto(const QExpansion& f, const QExpansion& g, const ResidueMapPtr& r,
                    long long bound) {
  if (bound > f.precision() || bound > g.precision())
    throw PrecisionTooLow("congruence test to " + std::to_string(bound) +
                          " exceeds stored precision");
  for (long long n = 0; n <= bound; ++n)
    if (r->reduce(f.a(n)) != r->reduce(g.a(n))) return false;
  return true;
}

// ---------- ResidueSeries ----------

namespace {
ResidueElt reduce_char_value(const DirichletCharacter& chi, long long a, const ResidueMapPtr& map) {
  if (chi.rational_valued()) return map->from_mpq(chi.rational_value(a));
  return map->reduce(chi.value(a));  // RingMismatch if the rings differ
}
}  // namespace

ResidueSeries::ResidueSeries(int weight, long long level, DirichletCharacter chi,
                             ResidueMapPtr map, long long precision)
    : k_(weight), N_(level), chi_(std::move(chi)), map_(std::move(map)), B_(precision) {
  if (!map_) throw SchemaError("ResidueSeries needs a residue map");
  if (B_ < 0) throw SchemaError("precision must be >= 0");
  c_.assign((size_t)(B_ + 1) * map_->inertia(), 0);
}

ResidueSeries ResidueSeries::reduce_of(const QExpansion& f, const ResidueMapPtr& map) {
  ResidueSeries r(f.weight(), f.level(), f.character(), map, f.precision());
  unsigned h = map->inertia();
  for (long long n = 0; n <= f.precision(); ++n) {
    ResidueElt v = map->reduce(f.a(n));
    std::copy(v.coords().begin(), v.coords().end(), r.c_.begin() + (size_t)n * h);
  }
  return r;
}

ResidueElt ResidueSeries::a(long long n) const {
  if (n < 0) return map_->zero();
  if (n > B_)
    throw PrecisionTooLow("coefficient a(" + std::to_string(n) + ") requested, stored up to " +
                          std::to_string(B_));
  unsigned h = map_->inertia();
  std::vector<u64> v(c_.begin() + (size_t)n * h, c_.begin() + (size_t)(n + 1) * h);
  return map_->from_coords(std::move(v));
}

void ResidueSeries::set(long long n, const ResidueElt& v) {
  if (n < 0 || n > B_) throw InternalCheckError("set out of range");
  if (!v.map() || !v.map()->same_map(*map_)) throw RingMismatch("set: wrong residue field");
  unsigned h = map_->inertia();
  std::copy(v.coords().begin(), v.coords().end(), c_.begin() + (size_t)n * h);
}

bool ResidueSeries::is_zero() const {
  for (u64 v : c_)
    if (v) return false;
  return true;
}

namespace {
void require_series_compatible(const ResidueSeries& f, const ResidueSeries& g, bool add) {
  if (!f.map() || !g.map() || !f.map()->same_map(*g.map()))
    throw RingMismatch("residue series over different residue fields");
  if (add) {
    if (f.weight() != g.weight())
      throw WeightMismatch("adding weight " + std::to_string(f.weight()) + " to weight " +
                           std::to_string(g.weight()));
    if (!f.character().same_character(g.character()))
      throw CharacterMismatch("adding " + f.character().name() + " to " + g.character().name());
  }
}
}  // namespace

ResidueSeries ResidueSeries::operator+(const ResidueSeries& g) const {
  require_series_compatible(*this, g, true);
  long long B = std::min(B_, g.B_);
  ResidueSeries r(k_, std::lcm(N_, g.N_), chi_, map_, B);
  u64 ell = map_->ell();
  size_t len = (size_t)(B + 1) * map_->inertia();
  for (size_t i = 0; i < len; ++i) r.c_[i] = addmod(c_[i], g.c_[i], ell);
  return r;
}

ResidueSeries ResidueSeries::operator-(const ResidueSeries& g) const {
  require_series_compatible(*this, g, true);
  long long B = std::min(B_, g.B_);
  ResidueSeries r(k_, std::lcm(N_, g.N_), chi_, map_, B);
  u64 ell = map_->ell();
  size_t len = (size_t)(B + 1) * map_->inertia();
  for (size_t i = 0; i < len; ++i) r.c_[i] = submod(c_[i], g.c_[i], ell);
  return r;
}

ResidueSeries ResidueSeries::scalar_mul(const ResidueElt& s) const {
  if (!s.map() || !s.map()->same_map(*map_)) throw RingMismatch("scalar_mul: wrong residue field");
  ResidueSeries r(*this);
  unsigned h = map_->inertia();
  if (h == 1) {
    u64 ell = map_->ell(), sv = s.coords()[0];
    for (auto& v : r.c_) v = mulmod(v, sv, ell);
  } else {
    std::vector<u64> tmp(h);
    for (long long n = 0; n <= B_; ++n) {
      map_->fq_mul(&c_[(size_t)n * h], s.coords().data(), tmp.data());
      std::copy(tmp.begin(), tmp.end(), r.c_.begin() + (size_t)n * h);
    }
  }
  return r;
}

ResidueSeries ResidueSeries::operator*(const ResidueSeries& g) const {
  require_series_compatible(*this, g, false);
  long long B = std::min(B_, g.B_);
  unsigned h = map_->inertia();
  u64 ell = map_->ell();
  ResidueSeries r(k_ + g.k_, std::lcm(N_, g.N_), chi_ * g.chi_, map_, B);
  size_t out_len = (size_t)B + 1;
  if (h == 1) {
    r.c_ = conv_mod(c_, g.c_, ell, out_len);
    r.c_.resize(out_len, 0);
    return r;
  }
  // split into coordinate series, convolve pairwise, fold x-powers through g
  std::vector<std::vector<u64>> A(h), Bv(h);
  for (unsigned i = 0; i < h; ++i) {
    A[i].resize(B_ + 1);
    for (long long n = 0; n <= B_; ++n) A[i][n] = c_[(size_t)n * h + i];
    Bv[i].resize(g.B_ + 1);
    for (long long n = 0; n <= g.B_; ++n) Bv[i][n] = g.c_[(size_t)n * h + i];
  }
  std::vector<std::vector<u64>> C(2 * h - 1, std::vector<u64>(out_len, 0));
  for (unsigned i = 0; i < h; ++i)
    for (unsigned j = 0; j < h; ++j) {
      auto pc = conv_mod(A[i], Bv[j], ell, out_len);
      auto& ck = C[i + j];
      for (size_t n = 0; n < pc.size() && n < out_len; ++n) ck[n] = addmod(ck[n], pc[n], ell);
    }
  const auto& red = map_->power_reductions();
  for (size_t n = 0; n < out_len; ++n) {
    u64* out = &r.c_[n * h];
    for (unsigned i = 0; i < h; ++i) out[i] = C[i][n];
    for (unsigned t = 0; t + 1 < h; ++t) {
      u64 cv = C[h + t][n];
      if (!cv) continue;
      for (unsigned i = 0; i < h; ++i) out[i] = addmod(out[i], mulmod(cv, red[t][i], ell), ell);
    }
  }
  return r;
}

ResidueSeries ResidueSeries::mul_schoolbook(const ResidueSeries& g) const {
  require_series_compatible(*this, g, false);
  long long B = std::min(B_, g.B_);
  unsigned h = map_->inertia();
  u64 ell = map_->ell();
  ResidueSeries r(k_ + g.k_, std::lcm(N_, g.N_), chi_ * g.chi_, map_, B);
  std::vector<u64> prod(h), acc(h);
  for (long long n = 0; n <= B; ++n) {
    std::fill(acc.begin(), acc.end(), 0);
    long long lo = std::max<long long>(0, n - g.B_);
    long long hi = std::min<long long>(n, B_);
    for (long long i = lo; i <= hi; ++i) {
      map_->fq_mul(&c_[(size_t)i * h], &g.c_[(size_t)(n - i) * h], prod.data());
      for (unsigned t = 0; t < h; ++t) acc[t] = addmod(acc[t], prod[t], ell);
    }
    std::copy(acc.begin(), acc.end(), r.c_.begin() + (size_t)n * h);
  }
  return r;
}

ResidueSeries ResidueSeries::pow_u(unsigned e) const {
  if (e == 0) {
    ResidueSeries r(0, N_, DirichletCharacter::trivial(N_), map_, B_);
    r.set(0, map_->one());
    return r;
  }
  ResidueSeries r(*this);
  for (unsigned i = 1; i < e; ++i) r = r * *this;
  return r;
}

ResidueSeries ResidueSeries::hecke_Tp(u64 p) const {
  if (!is_prime_u64(p)) throw MathError("hecke_Tp: " + std::to_string(p) + " is not prime");
  if (B_ < (long long)p)
    throw PrecisionTooLow("T_" + std::to_string(p) + " needs precision >= " + std::to_string(p));
  long long B = B_ / (long long)p;
  unsigned h = map_->inertia();
  u64 ell = map_->ell();
  mpz_class pk1;
  mpz_ui_pow_ui(pk1.get_mpz_t(), p, k_ >= 1 ? k_ - 1 : 0);
  ResidueElt s = reduce_char_value(chi_, (long long)p, map_) * map_->from_mpz(pk1);
  ResidueSeries r(k_, N_, chi_, map_, B);
  std::vector<u64> tmp(h);
  for (long long n = 0; n <= B; ++n) {
    u64* out = &r.c_[(size_t)n * h];
    const u64* top = &c_[(size_t)(n * (long long)p) * h];
    std::copy(top, top + h, out);
    if (n % (long long)p == 0 && !s.is_zero()) {
      map_->fq_mul(&c_[(size_t)(n / (long long)p) * h], s.coords().data(), tmp.data());
      for (unsigned t = 0; t < h; ++t) out[t] = addmod(out[t], tmp[t], ell);
    }
  }
  return r;
}

ResidueSeries ResidueSeries::b_delta(u64 delta) const {
  if (delta == 0) throw SchemaError("b_delta: delta must be >= 1");
  if (delta == 1) return *this;
  long long newN = N_ * (long long)delta;
  DirichletCharacter chi = chi_.is_principal() ? DirichletCharacter::trivial(newN) : chi_;
  ResidueSeries r(k_, newN, chi, map_, B_);
  unsigned h = map_->inertia();
  for (long long n = 0; n * (long long)delta <= B_; ++n)
    std::copy(c_.begin() + (size_t)n * h, c_.begin() + (size_t)(n + 1) * h,
              r.c_.begin() + (size_t)(n * (long long)delta) * h);
  return r;
}

ResidueSeries ResidueSeries::coprime_part(u64 M) const {
  if (M == 0) throw SchemaError("coprime_part: M must be >= 1");
  long long newN = ((long long)M == N_) ? N_ * N_ : N_ * (long long)(M * M);
  DirichletCharacter chi = chi_.is_principal() ? DirichletCharacter::trivial(newN) : chi_;
  ResidueSeries r(k_, newN, chi, map_, B_);
  unsigned h = map_->inertia();
  for (long long n = 0; n <= B_; ++n)
    if (std::gcd((u64)n, M) == 1)
      std::copy(c_.begin() + (size_t)n * h, c_.begin() + (size_t)(n + 1) * h,
                r.c_.begin() + (size_t)n * h);
  return r;
}

ResidueSeries ResidueSeries::truncate(long long B) const {
  if (B < 0 || B > B_) throw PrecisionTooLow("truncate to " + std::to_string(B));
  ResidueSeries r(k_, N_, chi_, map_, B);
  std::copy(c_.begin(), c_.begin() + (size_t)(B + 1) * map_->inertia(), r.c_.begin());
  return r;
}

ResidueSeries ResidueSeries::with_weight(int k) const {
  ResidueSeries r(*this);
  r.k_ = k;
  return r;
}

bool ResidueSeries::equal_upto(const ResidueSeries& g, long long bound) const {
  require_series_compatible(*this, g, false);
  if (bound > B_ || bound > g.B_)
    throw PrecisionTooLow("congruence test to " + std::to_string(bound) +
                          " exceeds stored precision");
  unsigned h = map_->inertia();
  return std::equal(c_.begin(), c_.begin() + (size_t)(bound + 1) * h, g.c_.begin());
}

// ---------- JSON ----------

using nlohmann::json;

std::string qexp_to_json(const QExpansion& f) {
  json j;
  j["weight"] = f.weight();
  j["level"] = f.level();
  j["character"] = character_to_json(f.character());
  j["precision"] = f.precision();
  json mp = json::array();
  for (const auto& c : f.ring()->min_poly()) mp.push_back(c.get_str());
  j["ring_minpoly"] = mp;
  json coeffs = json::array();
  for (long long n = 0; n <= f.precision(); ++n) {
    json coords = json::array();
    for (const auto& q : f.a(n).coords())
      coords.push_back(json::array({q.get_num().get_str(), q.get_den().get_str()}));
    coeffs.push_back(coords);
  }
  j["coeffs"] = coeffs;
  return j.dump(2);
}

QExpansion qexp_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad JSON: ") + e.what());
  }
  try {
    int k = (int)json_to_mpz(j.at("weight")).get_si();
    long long N = (long long)json_to_mpz(j.at("level")).get_si();
    std::vector<mpz_class> mp;
    for (const auto& c : j.at("ring_minpoly")) mp.push_back(json_to_mpz(c));
    RingPtr ring = NumberRing::make(mp);
    DirichletCharacter chi =
        character_from_json(j.contains("character") ? j["character"] : json(), ring);
    std::vector<RingElement> coeffs;
    for (const auto& coords : j.at("coeffs")) {
      std::vector<mpq_class> c;
      for (const auto& pair : coords) {
        mpq_class q(json_to_mpz(pair.at(0)), json_to_mpz(pair.at(1)));
        q.canonicalize();
        c.push_back(q);
      }
      c.resize(ring->degree(), mpq_class(0));
      coeffs.emplace_back(ring, std::move(c));
    }
    long long prec = j.contains("precision") ? (long long)json_to_mpz(j["precision"]).get_si()
                                             : (long long)coeffs.size() - 1;
    if (prec != (long long)coeffs.size() - 1)
      throw SchemaError("precision field disagrees with coefficient count");
    return QExpansion(k, N, chi, ring, std::move(coeffs));
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad q-expansion JSON: ") + e.what());
  }
}

}  // namespace modl
