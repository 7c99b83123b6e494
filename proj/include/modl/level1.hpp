#pragma once

#include <string>
#include <vector>

#include "modl/qexp.hpp"

namespace modl {

// a normalized Hecke newform (or Eisenstein analogue): a(1) = 1, a(0) = constant term
struct NewformRecord {
  std::string label;
  bool is_eisenstein = false;
  QExpansion form;

  int weight() const { return form.weight(); }
  long long level() const { return form.level(); }
  const RingPtr& ring() const { return form.ring(); }
  const RingElement& b(long long n) const { return form.a(n); }
  long long precision() const { return form.precision(); }
};

// exact Bernoulli numbers B_0..B_n (B_1 = -1/2)
mpq_class bernoulli(unsigned n);
// generalized Bernoulli number B_{k,chi} for a rational-valued character
mpq_class bernoulli_generalized(unsigned k, const DirichletCharacter& chi);

// E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n, exact over the rationals
QExpansion eisenstein_Ek(int k, long long B);
// Ramanujan Delta = q prod (1-q^n)^24 via the pentagonal-number expansion
QExpansion delta(long long B);
// integer coefficients of prod_{n>=1} (1-q^n)^e for e in {1..}, helper for tests
std::vector<mpz_class> eta_power(unsigned e, long long B);

long long dim_Mk_level1(int k);
long long dim_Sk_level1(int k);

// echelon basis of M_k(SL2(Z)): a(g_i, j) = delta_{ij} for 0 <= i,j < dim
std::vector<QExpansion> victor_miller_basis(int k, long long B);

// all normalized eigenforms of weight k, level 1: cusp records (labels k.1.a, k.1.b, ...)
// in the fixed conjugate order, then the Eisenstein record (label k.1.eis)
std::vector<NewformRecord> eigenforms(int k, long long B);

// E_{chi1,chi2} with b(n) = sum_{d|n} chi1(n/d) chi2(d) d^{k-1}
NewformRecord eisenstein_newform(const DirichletCharacter& chi1, const DirichletCharacter& chi2,
                                 int k, long long B);

// reduced (mod-l) counterparts used for high-precision work
ResidueSeries eisenstein_Ek_reduced(int k, long long B, const ResidueMapPtr& map);
ResidueSeries delta_reduced(long long B, const ResidueMapPtr& map);
std::vector<ResidueSeries> victor_miller_basis_reduced(int k, long long B,
                                                       const ResidueMapPtr& map);
// high-precision reduction of a record: native level-1 records are recomputed to B,
// others must already store precision >= B
ResidueSeries newform_reduced(const NewformRecord& rec, long long B, const ResidueMapPtr& map);

}  // namespace modl
