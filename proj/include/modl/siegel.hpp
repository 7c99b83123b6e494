#pragma once
// degree-n Siegel Fourier tables keyed by half-integral symmetric matrices,
// with native degree-2 reduction, slicing, and counting
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "modl/count.hpp"
#include "modl/numring.hpp"
#include "modl/qexp.hpp"

namespace modl {

// half-integral symmetric T, stored as the integral matrix 2T (even diagonal),
// upper triangle row-major
class SiegelKey {
 public:
  SiegelKey(int degree, std::vector<long long> upper_2t);
  // n = 2 key T = [[t11, t12], [t12, t22]] given as (t11, 2*t12, t22)
  static SiegelKey from_abc(long long t11, long long two_t12, long long t22);
  static SiegelKey from_diag(const std::vector<long long>& t_diag);
  // [[S, 0], [0, 0]]: embed a degree-(n-1) key in degree n
  static SiegelKey pad(const SiegelKey& s);

  int degree() const { return n_; }
  const std::vector<long long>& upper() const { return u_; }
  long long two_t(int i, int j) const;          // entry of 2T
  long long t_diag(int i) const;                // diagonal entry of T
  long long m_norm() const;                     // max diagonal entry of T
  long long trace_t() const;                    // trace of T

  mpz_class det2() const;                       // det(2T), exact
  mpq_class det_t() const;                      // det(T) = det(2T)/2^n
  std::optional<mpz_class> det_t_int() const;   // det(T) when integral

  // gcd of the t_ii and the 2 t_ij (i != j); ZeroMatrix on T = 0
  long long content() const;
  bool is_primitive() const { return content() == 1; }
  // gcd of the diagonal entries of T except the first (degree >= 2)
  long long dcal() const;

  int rank() const;  // rank of 2T over Q
  bool is_psd() const;  // every principal minor of 2T nonnegative
  bool is_positive_definite() const;

  // T[U] = U^t T U for integral U
  SiegelKey transform(const std::vector<std::vector<long long>>& U) const;

  // degree-(n-1) lower-right block and the first off-diagonal row (2T)_{0,j>0}
  SiegelKey lower_right() const;
  std::vector<long long> first_row_off() const;

  bool operator==(const SiegelKey& o) const { return n_ == o.n_ && u_ == o.u_; }
  bool operator!=(const SiegelKey& o) const { return !(*this == o); }
  bool operator<(const SiegelKey& o) const;  // lexicographic, for map keys

  std::string to_string() const;

 private:
  int n_ = 0;
  std::vector<long long> u_;  // n(n+1)/2 entries
};

// F(Z) = sum a_F(T) e(TZ): finite table of a_F over the box M(T) <= b_supp;
// absent in-box keys read as exact zeros, out-of-box lookups are errors
class SiegelExpansion {
 public:
  SiegelExpansion(int degree, int weight, long long level, RingPtr ring, long long b_supp);

  int degree() const { return n_; }
  int weight() const { return k_; }
  long long level() const { return N_; }
  const RingPtr& ring() const { return ring_; }
  long long b_supp() const { return b_; }

  // validates degree, positive semi-definiteness, and the support box
  void set(const SiegelKey& t, RingElement v);
  const RingElement& at(const SiegelKey& t) const;  // KeyMissing out of box
  bool in_box(const SiegelKey& t) const;            // psd and M(T) <= b_supp
  bool has(const SiegelKey& t) const;               // stored with nonzero value

  const std::map<SiegelKey, RingElement>& table() const { return tab_; }
  bool empty() const { return tab_.empty(); }

 private:
  int n_;
  int k_;
  long long N_;
  RingPtr ring_;
  long long b_;
  std::map<SiegelKey, RingElement> tab_;
  RingElement zero_;
};

// a_F(T[U]) = a_F(T) on the generator set, for every stored key whose image
// stays in the box; InvarianceViolation otherwise (level-1 tables, n = 2)
void validate_gl_invariance(const SiegelExpansion& f);

// interchange format { degree, weight, level, ring_minpoly, b_supp, entries:
// [{t2: [upper triangle of 2T], a: [coords]}] }
SiegelExpansion load_siegel(const std::string& path, bool skip_validation = false);
std::string siegel_to_json(const SiegelExpansion& f);
void save_siegel(const SiegelExpansion& f, const std::string& path);

// ceil((4/3)^n (k/16) [Sp(n,Z):Gamma_1^n(N)]); the degree-2 index for N > 1 is
// the documented over-approximation N^3 prod (1-p^-2)(1-p^-4) unless an exact
// index is supplied
long long sturm_bound_n(int n, int k, const mpz_class& N, const mpz_class& index_override = 0);

// Gauss-reduced class representative: 0 <= 2 T12 <= T11 <= T22 (T12 >= 0
// always: diag(1,-1) merges the sign classes); NotPositiveDefinite unless T > 0
SiegelKey gl2_reduce(const SiegelKey& t);
bool gl_equivalent(const SiegelKey& a, const SiegelKey& b);

// max rank(T) over keys with nonzero residue; AllCoefficientsVanish if none
int singular_rank(const SiegelExpansion& f, const ResidueMapPtr& r);
// the singular-rank weight relation: (ell - 1) | (2k - t)
bool weight_congruence_check(int k, int t, unsigned long long ell);

// elliptic restriction: a(f, r) = sum of a_F(T) over stored T with
// T = T0 mod R and diag(T) = (r, tail of diag(T0)); level becomes N R^2.
// prec = -1 means the full support box
QExpansion diagonal_restrict(const SiegelExpansion& f, const SiegelKey& t0, long long R,
                             long long prec = -1);

// R = (2 S^1(k, N^2) + 1) Dcal(T0) + 1; asserts gcd(R, Dcal) = 1 and that no
// second stored key collides with T0 under (mod R, equal diagonal)
long long choose_R(const SiegelExpansion& f, const SiegelKey& t0, int k, long long N);

// keep a_F(T) iff gcd(tr(LT), N) = 1; level metadata becomes N^2. strict mode
// validates L_{ij} = 0 mod N (i != j) and L_{11} = 0 mod N
SiegelExpansion twist_by_trace(const SiegelExpansion& f, const std::vector<std::vector<long long>>& L,
                               long long N, bool strict = false);

// Fourier-Jacobi slice of index S: b(r, mu) = a_F([[r, mu/2], [mu^t/2, S]])
struct JacobiSlice {
  SiegelKey index;  // S, degree n-1
  int weight = 0;
  long long level = 1;
  RingPtr ring;
  long long b_supp = 0;  // bound on r
  std::map<std::pair<long long, std::vector<long long>>, RingElement> table;

  long long m() const { return index.t_diag(0); }  // n = 2 only
  RingElement at(long long r, const std::vector<long long>& mu) const;
  RingElement at(long long r, long long mu) const;  // n = 2
};

JacobiSlice fourier_jacobi(const SiegelExpansion& f, const SiegelKey& s);
JacobiSlice fourier_jacobi(const SiegelExpansion& f, long long m);  // n = 2

// one theta component h_{mu0}: series in q^{1/(4m)} stored with integer
// exponents 4 m r - mu^2 (metadata denom = 4m records the scaling)
struct ThetaComponent {
  long long m = 1;
  long long mu0 = 0;
  int weight = 0;
  long long level = 1;
  RingPtr ring;
  long long denom = 4;         // 4m
  long long max_exponent = 0;  // exponents covered: 0 .. max_exponent
  std::map<long long, RingElement> coeff;  // nonzero entries only
};

// split a degree-2 slice into components mu0 in Z/2m; the reconstruction
// b(r, mu) = h_{mu mod 2m}[4 m r - mu^2] is asserted on every entry
std::map<long long, ThetaComponent> theta_components(const JacobiSlice& slice);

// zero the entries with gcd(r, mu, content(S)) > 1
JacobiSlice primitive_subseries(const JacobiSlice& slice);

// Siegel Phi-operator: keep coefficients at block keys [[S, 0], [0, 0]]
SiegelExpansion phi_operator(const SiegelExpansion& f);

// H(tau) = h_{mu0}(4 d tau): integer-exponent carrier with a(H, d e / (4m))
// = h[e]; half-integral weight tag kappa = k - 1/2 rides along, level 16 d^2 N.
// d = 0 selects the default normalizer det(2S) = 2m
struct EllipticCarrier {
  QExpansion series;
  mpq_class kappa;
  long long d = 1;
};

EllipticCarrier h_to_elliptic(const ThetaComponent& h, long long d = 0);

// pi_F(x, det): integers d <= x admitting a positive-definite T with
// det(T) = d and nonzero residue; checkpoints at every integer 1..x.
// squarefree/prime filters intersect with the odd integers.
// Sound for x <= b_supp: a reduced positive-definite form with det <= x
// has T22 <= x (det >= T22 (T11 - 1) - T11^2/4 + T22 handles T11 >= 2).
CountSeries count_det(const SiegelExpansion& f, const ResidueMapPtr& r, long long x,
                      const FilterSpec& filter);
// same over trace(T) = d; sound for x <= b_supp + 1
CountSeries count_trace(const SiegelExpansion& f, const ResidueMapPtr& r, long long x);
// brute-force cross-checks enumerating every box key, not just reduced ones
CountSeries count_det_naive(const SiegelExpansion& f, const ResidueMapPtr& r, long long x,
                            const FilterSpec& filter);
CountSeries count_trace_naive(const SiegelExpansion& f, const ResidueMapPtr& r, long long x);

// reduced representatives of the primitive classes with det(T) <= det_bound and
// nonzero residue, sorted by (det, key order)
std::vector<SiegelKey> primitive_classes(const SiegelExpansion& f, const ResidueMapPtr& r,
                                         long long det_bound);

// random element of GL_n(Z) built from elementary row operations (test helper)
std::vector<std::vector<long long>> random_unimodular(int n, std::mt19937_64& rng, int steps = 6);

}  // namespace modl
