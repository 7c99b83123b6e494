#pragma once

#include <string>
#include <vector>

#include "modl/intutil.hpp"
#include "modl/numring.hpp"
#include "modl/residue.hpp"

namespace modl {

// Dirichlet character mod q; trivial and quadratic (Kronecker) characters are
// evaluated on the fly, explicit tables are validated at construction.
class DirichletCharacter {
 public:
  enum class Kind { Trivial, Kronecker, Table };

  DirichletCharacter();  // trivial character mod 1

  static DirichletCharacter trivial(long long modulus = 1);
  static DirichletCharacter kronecker(const mpz_class& D);  // a |-> (D/a), modulus |D|
  // explicit table of values chi(0..q-1); throws MultiplicativityViolation
  static DirichletCharacter table(long long modulus, RingPtr ring,
                                  std::vector<RingElement> values);

  Kind kind() const { return kind_; }
  long long modulus() const { return q_; }
  bool is_principal() const { return kind_ == Kind::Trivial; }
  const mpz_class& discriminant() const { return D_; }  // Kronecker only
  const RingPtr& ring() const { return ring_; }          // ring the values live in

  // chi(a) as a ring element of ring(); zero on non-units
  RingElement value(long long a) const;
  // chi(a) coerced into R; throws CharacterMismatch if the values do not live there
  RingElement value_in(const RingPtr& R, long long a) const;
  // chi(a) when the values are rational (Trivial/Kronecker always are)
  mpq_class rational_value(long long a) const;
  bool rational_valued() const;

  bool is_odd() const;  // chi(-1) = -1

  DirichletCharacter operator*(const DirichletCharacter& o) const;
  bool same_character(const DirichletCharacter& o) const;

  std::string name() const;  // "trivial", "kronecker:D", "table mod q"

 private:
  Kind kind_ = Kind::Trivial;
  long long q_ = 1;
  mpz_class D_;
  RingPtr ring_;
  std::vector<RingElement> values_;  // Table only, indices 0..q-1
};

// truncated q-series sum_{n=0..B} a(n) q^n with modular-form metadata
class QExpansion {
 public:
  QExpansion() = default;
  QExpansion(int weight, long long level, DirichletCharacter chi, RingPtr ring,
             std::vector<RingElement> coeffs);

  static QExpansion zero(int weight, long long level, const RingPtr& ring, long long precision);

  int weight() const { return k_; }
  long long level() const { return N_; }
  const DirichletCharacter& character() const { return chi_; }
  const RingPtr& ring() const { return ring_; }
  long long precision() const { return (long long)c_.size() - 1; }  // B
  const std::vector<RingElement>& coeffs() const { return c_; }

  const RingElement& a(long long n) const;  // zero for n < 0, PrecisionTooLow past B
  RingElement a_at(const mpq_class& x) const;  // zero at non-integral or negative index
  void set(long long n, RingElement v);

  bool is_zero() const;

  QExpansion operator+(const QExpansion& g) const;
  QExpansion operator-(const QExpansion& g) const;
  QExpansion operator-() const;
  QExpansion scalar_mul(const RingElement& s) const;
  QExpansion scalar_mul(const mpq_class& s) const;
  QExpansion operator*(const QExpansion& g) const;       // parallel kernel
  QExpansion mul_serial(const QExpansion& g) const;      // reference implementation
  QExpansion pow_u(unsigned e) const;

  QExpansion hecke_Tp(u64 p) const;      // precision floor(B/p)
  QExpansion b_delta(u64 delta) const;   // index dilation, level *= delta
  QExpansion coprime_part(u64 M) const;  // keep gcd(n,M)=1; level N^2 or N*M^2
  QExpansion truncate(long long B) const;

  QExpansion with_weight(int k) const;  // metadata override (ladder bookkeeping)

  std::string to_string(long long upto = 8) const;

 private:
  int k_ = 0;
  long long N_ = 1;
  DirichletCharacter chi_;
  RingPtr ring_;
  std::vector<RingElement> c_;
};

// reduced series over F_{ell^h}: flat coordinate storage for bulk work
class ResidueSeries {
 public:
  ResidueSeries() = default;
  ResidueSeries(int weight, long long level, DirichletCharacter chi, ResidueMapPtr map,
                long long precision);  // zero series

  static ResidueSeries reduce_of(const QExpansion& f, const ResidueMapPtr& map);

  int weight() const { return k_; }
  long long level() const { return N_; }
  const DirichletCharacter& character() const { return chi_; }
  const ResidueMapPtr& map() const { return map_; }
  long long precision() const { return B_; }
  const std::vector<u64>& data() const { return c_; }

  ResidueElt a(long long n) const;
  void set(long long n, const ResidueElt& v);
  bool is_zero() const;

  ResidueSeries operator+(const ResidueSeries& g) const;
  ResidueSeries operator-(const ResidueSeries& g) const;
  ResidueSeries scalar_mul(const ResidueElt& s) const;
  ResidueSeries operator*(const ResidueSeries& g) const;   // NTT-backed when profitable
  ResidueSeries mul_schoolbook(const ResidueSeries& g) const;  // serial reference
  ResidueSeries pow_u(unsigned e) const;

  ResidueSeries hecke_Tp(u64 p) const;
  ResidueSeries b_delta(u64 delta) const;
  ResidueSeries coprime_part(u64 M) const;
  ResidueSeries truncate(long long B) const;
  ResidueSeries with_weight(int k) const;

  bool equal_upto(const ResidueSeries& g, long long bound) const;

 private:
  int k_ = 0;
  long long N_ = 1;
  DirichletCharacter chi_;
  ResidueMapPtr map_;
  long long B_ = -1;
  std::vector<u64> c_;  // (B+1) * h flat, coefficient n at [n*h, (n+1)*h)
};

// ceil(k/12 * [SL2(Z) : Gamma_1(N)])
mpz_class sturm_bound_1(long long k, const mpz_class& N);
mpz_class gamma1_index(const mpz_class& N);  // iota(1)=1, iota(2)=3, N^2 prod (1-p^-2) else

// a(f,n) = a(g,n) mod the residue map for all 0 <= n <= bound
bool congruent_upto(const QExpansion& f, const QExpansion& g, const ResidueMapPtr& r,
                    long long bound);

// JSON round-trip: {weight, level, character, precision, ring_minpoly, coeffs}
std::string qexp_to_json(const QExpansion& f);
QExpansion qexp_from_json(const std::string& text);

}  // namespace modl
