#pragma once
// nonvanishing counters pi(f,x) mod l, density-exponent fits, eigen-congruence
// detection, and the oldform witness/certificate tests
#include <optional>
#include <string>
#include <vector>

#include "modl/ingest.hpp"
#include "modl/qexp.hpp"

namespace modl {

struct FilterSpec {
  enum class Kind { None, SquareFree, Prime, CoprimeTo };
  Kind kind = Kind::None;
  long long Q = 1;          // modulus for CoprimeTo
  bool odd_only = false;    // intersect with odd n (degree-2 counters use this)

  static FilterSpec none() { return {}; }
  static FilterSpec squarefree(bool odd = false) { return {Kind::SquareFree, 1, odd}; }
  static FilterSpec prime(bool odd = false) { return {Kind::Prime, 1, odd}; }
  static FilterSpec coprime_to(long long Q) { return {Kind::CoprimeTo, Q, false}; }
  // "none" | "sf" | "prime" | "coprime:Q", with "-odd" suffix when restricted
  static FilterSpec parse(const std::string& text);
  std::string descriptor() const;

  bool admits(long long n, const std::vector<int>& spf) const;
};

struct CountSeries {
  std::vector<long long> xs;      // strictly increasing checkpoints
  std::vector<long long> counts;  // pi(x_i), nondecreasing
  std::string filter;
  std::string label;
  std::string ell;  // residue-map descriptor, e.g. "7" or "7^2"

  long long at_x(long long x) const;  // count at an exact checkpoint
  std::string to_csv() const;         // header x,count,filter,label,ell
};

// checkpoints 1000*2^i up to x, plus x itself
std::vector<long long> default_grid(long long x);

// exact count of n <= x_max with a(f,n) != 0 in the residue field, recorded at
// the given checkpoints; single streaming pass, parallel over blocks
CountSeries pi_count(const ResidueSeries& f, const std::vector<long long>& grid,
                     const FilterSpec& filter, const std::string& label);
CountSeries pi_count(const ResidueSeries& f, long long x, const FilterSpec& filter,
                     const std::string& label);

struct FitResult {
  double c = 0.0;
  double alpha = 0.0;
  double max_rel_residual = 0.0;
  bool model_mismatch = false;  // heuristic flag: residual above threshold
};

// least-squares fit of log(x/pi) = alpha*loglog x - log c; heuristic estimate,
// never a proof; needs >= 5 checkpoints with positive counts
FitResult fit_alpha(const CountSeries& s);

struct HProbeResult {
  int h = 0;
  std::vector<double> scores;  // per-candidate max relative residual
  FitResult best;
};

// try pi ~ c x (loglog x)^h / (log x)^alpha for h = 0..h_max, pick the best fit
HProbeResult h_probe(const CountSeries& s, int h_max);

// smallest n <= bound with gcd(n, lcm of levels) = 1 and b_i(n) != b_j(n) mod l;
// scans all such n and, independently, prime powers only — the two must agree
std::optional<long long> eigen_congruence_witness(const FormBundle& bundle, int i, int j,
                                                  const ResidueMapPtr& r, long long bound);
bool eigen_congruence_detect(const FormBundle& bundle, int i, int j, const ResidueMapPtr& r,
                             long long bound);

struct OldformVerdict {
  enum class Kind { NonvanishingWitness, OldModEll, ZeroModEll };
  struct CertTerm {
    std::string label;   // bundle record supplying the column
    long long dilation;  // the divisor of gcd(Q, N) used
    ResidueElt alpha;    // mod-l coefficient
  };
  Kind kind = Kind::ZeroModEll;
  long long witness = 0;        // for NonvanishingWitness
  std::vector<CertTerm> terms;  // for OldModEll
  std::string detail;
};

// scan n <= scan_bound coprime to Q for a nonvanishing witness; failing that,
// certify f = 0 mod l by Sturm, or solve for f as a mod-l combination of
// dilated bundle forms when gcd(Q, level) > 1; throws Inconclusive otherwise
OldformVerdict oldform_test(const ResidueSeries& f, const FormBundle& bundle,
                            const ResidueMapPtr& r, long long Q, long long scan_bound);

}  // namespace modl
