#pragma once
// Orders Z[theta]/(m(theta)) with exact rational coordinates in the power
// basis. m must be monic; irreducibility over Q is only partially verified
// (rational-root test, plus a small-prime certificate when one exists).
#include <gmpxx.h>

#include <memory>
#include <string>
#include <vector>

namespace modl {

class NumberRing;
using RingPtr = std::shared_ptr<const NumberRing>;

class NumberRing {
 public:
  // coefficients c0..cd of m(x) = c0 + c1 x + ... + cd x^d, cd must be 1
  explicit NumberRing(std::vector<mpz_class> min_poly);

  static RingPtr make(std::vector<mpz_class> min_poly);
  static RingPtr rationals();                  // m(x) = x, theta = 0
  static RingPtr quadratic(const mpz_class& D);  // m(x) = x^2 - D

  unsigned degree() const { return (unsigned)(m_.size() - 1); }
  const std::vector<mpz_class>& min_poly() const { return m_; }
  bool is_rational() const { return degree() == 1; }
  // true if a cheap certificate established irreducibility over Q
  bool irreducibility_certified() const { return certified_; }

  // theta^(d+j) in the power basis, j = 0 .. d-2 (empty for d = 1)
  const std::vector<std::vector<mpz_class>>& power_reductions() const { return powred_; }

  bool same_ring(const NumberRing& o) const { return m_ == o.m_; }

 private:
  std::vector<mpz_class> m_;
  std::vector<std::vector<mpz_class>> powred_;
  bool certified_ = false;
};

void require_same_ring(const RingPtr& a, const RingPtr& b, const char* where);

class RingElement {
 public:
  RingElement() = default;  // null element; only assignment is legal on it
  RingElement(RingPtr ring, std::vector<mpq_class> coords);

  static RingElement zero(const RingPtr& R);
  static RingElement one(const RingPtr& R);
  static RingElement theta(const RingPtr& R);
  static RingElement from_rational(const RingPtr& R, const mpq_class& q);
  static RingElement from_int(const RingPtr& R, long v);

  const RingPtr& ring() const { return R_; }
  const std::vector<mpq_class>& coords() const { return c_; }
  bool is_null() const { return !R_; }
  bool is_zero() const;
  bool is_rational_value() const;       // all theta-coordinates vanish
  const mpq_class& rational_value() const;  // requires is_rational_value()

  RingElement operator-() const;
  RingElement operator+(const RingElement& o) const;
  RingElement operator-(const RingElement& o) const;
  RingElement operator*(const RingElement& o) const;
  RingElement& operator+=(const RingElement& o);
  RingElement& operator-=(const RingElement& o);
  RingElement& operator*=(const RingElement& o);
  RingElement operator*(const mpq_class& s) const;
  RingElement operator/(const RingElement& o) const;  // o.inverse() under the hood
  bool operator==(const RingElement& o) const;
  bool operator!=(const RingElement& o) const { return !(*this == o); }

  RingElement inverse() const;  // NotInvertible if gcd with min poly is not 1
  mpq_class norm() const;       // determinant of the multiplication-by-this matrix
  mpq_class trace() const;

  std::string to_string() const;  // human-readable, "5 - 12*th" style

 private:
  RingPtr R_;
  std::vector<mpq_class> c_;
};

}  // namespace modl
