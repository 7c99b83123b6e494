#pragma once

#include <memory>
#include <string>
#include <vector>

#include "modl/intutil.hpp"
#include "modl/numring.hpp"

namespace modl {

// dense polynomial over F_ell, coefficients low-to-high, trailing zeros trimmed
using FpPoly = std::vector<u64>;

// polynomial helpers over F_ell (exposed for tests)
FpPoly fp_trim(FpPoly p);
FpPoly fp_add(const FpPoly& a, const FpPoly& b, u64 ell);
FpPoly fp_sub(const FpPoly& a, const FpPoly& b, u64 ell);
FpPoly fp_mul(const FpPoly& a, const FpPoly& b, u64 ell);
FpPoly fp_rem(FpPoly a, const FpPoly& b, u64 ell);
FpPoly fp_gcd(FpPoly a, FpPoly b, u64 ell);  // monic gcd, {} for gcd(0,0)
FpPoly fp_monic(FpPoly p, u64 ell);
FpPoly fp_derivative(const FpPoly& p, u64 ell);
FpPoly fp_pow_mod(FpPoly base, mpz_class e, const FpPoly& mod, u64 ell);
// factor a monic square-free polynomial into monic irreducibles, canonically sorted
std::vector<FpPoly> fp_factor(const FpPoly& f, u64 ell);

class ResidueMap;
using ResidueMapPtr = std::shared_ptr<const ResidueMap>;

// element of F_{ell^h} = F_ell[x]/(g), h coordinates mod g
class ResidueElt {
 public:
  ResidueElt() = default;
  ResidueElt(ResidueMapPtr map, std::vector<u64> coords);

  const ResidueMapPtr& map() const { return map_; }
  const std::vector<u64>& coords() const { return c_; }

  bool is_zero() const;
  ResidueElt operator+(const ResidueElt& o) const;
  ResidueElt operator-(const ResidueElt& o) const;
  ResidueElt operator-() const;
  ResidueElt operator*(const ResidueElt& o) const;
  ResidueElt operator/(const ResidueElt& o) const;
  ResidueElt& operator+=(const ResidueElt& o);
  ResidueElt& operator-=(const ResidueElt& o);
  ResidueElt& operator*=(const ResidueElt& o);
  bool operator==(const ResidueElt& o) const;
  bool operator!=(const ResidueElt& o) const { return !(*this == o); }

  ResidueElt inverse() const;  // NotInvertible on zero
  ResidueElt pow(const mpz_class& e) const;

  std::string to_string() const;

 private:
  ResidueMapPtr map_;
  std::vector<u64> c_;  // length h, entries in [0, ell)
};

// the data of one prime above ell in Z[theta]/(m): an irreducible factor g of m mod ell
class ResidueMap : public std::enable_shared_from_this<ResidueMap> {
 public:
  u64 ell() const { return ell_; }
  const FpPoly& factor() const { return g_; }
  unsigned inertia() const { return h_; }  // residue degree = deg g
  unsigned index() const { return index_; }
  const RingPtr& ring() const { return ring_; }

  // x^(h+j) mod g for j = 0..h-2, each a length-h coordinate row
  const std::vector<std::vector<u64>>& power_reductions() const { return powred_; }

  ResidueElt zero() const;
  ResidueElt one() const;
  ResidueElt from_u64(u64 v) const;          // image of an integer
  ResidueElt from_mpz(const mpz_class& v) const;
  ResidueElt from_mpq(const mpq_class& v) const;  // DenominatorNotCoprime if ell | den
  ResidueElt from_coords(std::vector<u64> c) const;

  // reduction of a ring element: theta |-> x mod g, coordinates a/b -> a b^{-1} mod ell
  ResidueElt reduce(const RingElement& e) const;
  // canonical integral preimage with coordinates in [0, ell); reduce(lift(e)) == e
  RingElement lift(const ResidueElt& e) const;

  // flat-coordinate kernels used by bulk series arithmetic (a, b, out are h-long)
  void fq_add(const u64* a, const u64* b, u64* out) const;
  void fq_sub(const u64* a, const u64* b, u64* out) const;
  void fq_mul(const u64* a, const u64* b, u64* out) const;

  std::string label() const;  // e.g. "7:(x + 5)" for display

  bool same_map(const ResidueMap& o) const;

  // all primes above ell, one per irreducible factor of m mod ell, sorted canonically.
  // errors: NotSquareFreeModEll if gcd(m, m') mod ell is nonconstant, SchemaError if ell
  // is not prime or too large for the word-size arithmetic.
  static std::vector<ResidueMapPtr> primes_above(const RingPtr& ring, u64 ell);

 private:
  ResidueMap(RingPtr ring, u64 ell, FpPoly g, unsigned index);

  RingPtr ring_;
  u64 ell_ = 0;
  FpPoly g_;
  unsigned h_ = 0;
  unsigned index_ = 0;
  std::vector<std::vector<u64>> powred_;
};

std::vector<ResidueMapPtr> primes_above(const RingPtr& ring, u64 ell);

void require_same_map(const ResidueMapPtr& a, const ResidueMapPtr& b, const char* what);

}  // namespace modl
