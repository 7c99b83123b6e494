#pragma once
// newform decomposition, admissible prime sets, the obstruction product L,
// and the Hecke sieve emitting explicit mod-l congruence relations
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "modl/ingest.hpp"
#include "modl/qexp.hpp"
#include "modl/residue.hpp"

namespace modl {

// f = sum_{i, delta} alpha_{i,delta} f_i | B_delta, exact over the bundle ring
struct Decomposition {
  const FormBundle* bundle = nullptr;
  // alpha[i][j] pairs with divisors[i][j]: the admissible dilations of record i
  // (divisors of N / level(f_i))
  std::vector<std::vector<RingElement>> alpha;
  std::vector<std::vector<long long>> divisors;
  long long verified_upto = 0;

  bool is_zero_at(int i) const;  // all alpha_{i, *} = 0 exactly
};

// rows 0..bound of the dilation system solved exactly over the fraction field;
// the residual is then checked on every further common coefficient
Decomposition decompose(const QExpansion& f, const FormBundle& bundle);

// indices with some alpha_{i, delta} != 0
std::vector<int> support_set(const Decomposition& d);

enum class AdmissibleMode { Shared, Distinct };

struct AdmissibleSet {
  AdmissibleMode mode = AdmissibleMode::Shared;
  long long M = 1;  // all primes coprime to M
  std::vector<int> support;
  std::map<std::pair<int, int>, long long> q;  // unordered pair (i < j) -> prime

  long long at(int i, int j) const;
};

// shared: per pair the smallest prime q coprime to M separating b_i, b_j on the
// coprime-to-M parts; distinct: greedy rescan excluding already-chosen primes
AdmissibleSet admissible_set(const FormBundle& bundle, const std::vector<int>& support,
                             long long M, AdmissibleMode mode);

// L = prod over ordered pairs i != j in S of (b_i(q_{ij}) - b_j(q_{ij}))
RingElement script_L(const FormBundle& bundle, const AdmissibleSet& a);
// the row factor prod_{j != i0} (b_{i0}(q_{i0 j}) - b_j(q_{i0 j}))
RingElement script_L_row(const FormBundle& bundle, const AdmissibleSet& a, int i0);

// effective bound: ceil((4 W^{(k-1)/2})^{d/h}) with W the product of the pair
// primes (witnessed if given, else Sturm worst case); distinct mode grows the
// modulus pair by pair before taking the final Sturm bound
mpz_class ell_lower_bound(int k, long long N, long long M, int s, unsigned d, unsigned h,
                          AdmissibleMode mode, const AdmissibleSet* witnessed = nullptr);

// true iff every alpha reduces without DenominatorNotCoprime
bool check_l_integrality(const Decomposition& d, const ResidueMapPtr& r);

struct SieveTerm {
  RingElement beta;
  mpq_class gamma;  // ratio of admissible primes; a(f, x) = 0 at non-integral x
};

// a(g, n) = sum_t beta_t a(f, gamma_t Delta n) mod l for gcd(n, Q N) = 1
struct SieveRelation {
  int target_index = 0;
  std::string target_label;
  long long delta = 1;  // the paper-side dilation Delta
  std::vector<SieveTerm> terms;
  RingElement factor;  // the unit lead * alpha_{i0, Delta} divided out
  unsigned long long ell = 0;
  std::string map_label;
  long long verified_upto = 0;

  std::string to_json() const;
};

// the inductive Hecke sieve. preconditions, in checking order: f nonconstant
// mod l up to the Sturm bound; the row obstruction at the surviving index
// reduces to nonzero (ScriptLVanishes); every alpha l-integral (NotLIntegral).
// a(f, *) values for verification come from f_hi when given (high-precision
// reduction of f), else from reducing f itself
SieveRelation extract_newform_relation(const QExpansion& f, const FormBundle& bundle,
                                       const Decomposition& d, const AdmissibleSet& a,
                                       const ResidueMapPtr& r, long long Q, long long verify_bound,
                                       const ResidueSeries* f_hi = nullptr);

}  // namespace modl
