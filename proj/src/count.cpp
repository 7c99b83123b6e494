#include "modl/count.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "modl/errors.hpp"
#include "modl/intutil.hpp"
#include "modl/level1.hpp"

namespace modl {

namespace {

// flag fits whose best model still misses a checkpoint by more than this
constexpr double kMismatchThreshold = 0.05;

std::vector<int> spf_sieve(long long B) {
  std::vector<int> spf(B + 1, 0);
  for (long long i = 2; i <= B; ++i) {
    if (spf[i] != 0) continue;
    for (long long j = i; j <= B; j += i)
      if (spf[j] == 0) spf[j] = (int)i;
  }
  return spf;
}

bool squarefree_by_spf(long long n, const std::vector<int>& spf) {
  while (n > 1) {
    long long p = spf[n];
    n /= p;
    if (n % p == 0) return false;
  }
  return true;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

FilterSpec FilterSpec::parse(const std::string& text) {
  std::string base = text;
  bool odd = false;
  if (base.size() > 4 && base.substr(base.size() - 4) == "-odd") {
    odd = true;
    base = base.substr(0, base.size() - 4);
  }
  if (base == "none" && !odd) return none();
  if (base == "sf") return squarefree(odd);
  if (base == "prime" || base == "pr") return prime(odd);
  if (base.rfind("coprime:", 0) == 0 && !odd) {
    long long Q = 0;
    try {
      Q = std::stoll(base.substr(8));
    } catch (...) {
      throw SchemaError("bad filter modulus in '" + text + "'");
    }
    if (Q < 1) throw SchemaError("filter modulus must be positive in '" + text + "'");
    return coprime_to(Q);
  }
  throw SchemaError("unknown filter '" + text + "'");
}

std::string FilterSpec::descriptor() const {
  std::string base;
  switch (kind) {
    case Kind::None: base = "none"; break;
    case Kind::SquareFree: base = "sf"; break;
    case Kind::Prime: base = "prime"; break;
    case Kind::CoprimeTo: base = "coprime:" + std::to_string(Q); break;
  }
  if (odd_only) base += "-odd";
  return base;
}

bool FilterSpec::admits(long long n, const std::vector<int>& spf) const {
  if (n < 1) return false;
  if (odd_only && n % 2 == 0) return false;
  switch (kind) {
    case Kind::None:
      return true;
    case Kind::SquareFree:
      return squarefree_by_spf(n, spf);
    case Kind::Prime:
      return n > 1 && spf[n] == n;
    case Kind::CoprimeTo:
      return std::gcd(n, Q) == 1;
  }
  return false;
}

long long CountSeries::at_x(long long x) const {
  auto it = std::lower_bound(xs.begin(), xs.end(), x);
  if (it == xs.end() || *it != x)
    throw SchemaError("x = " + std::to_string(x) + " is not a checkpoint of this series");
  return counts[(size_t)(it - xs.begin())];
}

std::string CountSeries::to_csv() const {
  std::ostringstream out;
  out << "x,count,filter,label,ell\n";
  for (size_t i = 0; i < xs.size(); ++i)
    out << xs[i] << ',' << counts[i] << ',' << csv_escape(filter) << ',' << csv_escape(label)
        << ',' << csv_escape(ell) << '\n';
  return out.str();
}

std::vector<long long> default_grid(long long x) {
  if (x < 1) throw SchemaError("grid bound must be positive");
  std::vector<long long> g;
  for (long long c = 1000; c < x; c *= 2) g.push_back(c);
  g.push_back(x);
  return g;
}

CountSeries pi_count(const ResidueSeries& f, const std::vector<long long>& grid,
                     const FilterSpec& filter, const std::string& label) {
  if (grid.empty()) throw SchemaError("empty checkpoint grid");
  for (size_t i = 0; i < grid.size(); ++i)
    if (grid[i] < 1 || (i > 0 && grid[i] <= grid[i - 1]))
      throw SchemaError("checkpoints must be strictly increasing and positive");
  long long x_max = grid.back();
  if (f.precision() < x_max)
    throw PrecisionTooLow("counting to " + std::to_string(x_max) + " needs precision >= " +
                          std::to_string(x_max) + ", have " + std::to_string(f.precision()));

  std::vector<int> spf;
  if (filter.kind == FilterSpec::Kind::SquareFree || filter.kind == FilterSpec::Kind::Prime)
    spf = spf_sieve(x_max);

  unsigned h = f.map()->inertia();
  const u64* data = f.data().data();

  // independent counts per inter-checkpoint segment, then a prefix sum
  size_t m = grid.size();
  std::vector<long long> seg(m, 0);
#pragma omp parallel for schedule(dynamic)
  for (size_t s = 0; s < m; ++s) {
    long long lo = (s == 0) ? 1 : grid[s - 1] + 1;
    long long hi = grid[s];
    long long cnt = 0;
    for (long long n = lo; n <= hi; ++n) {
      if (!filter.admits(n, spf)) continue;
      const u64* row = data + (size_t)n * h;
      bool nonzero = false;
      for (unsigned t = 0; t < h; ++t) nonzero |= (row[t] != 0);
      if (nonzero) ++cnt;
    }
    seg[s] = cnt;
  }

  CountSeries out;
  out.xs = grid;
  out.counts.resize(m);
  long long acc = 0;
  for (size_t s = 0; s < m; ++s) {
    acc += seg[s];
    out.counts[s] = acc;
  }
  out.filter = filter.descriptor();
  out.label = label;
  out.ell = f.map()->label();
  return out;
}

CountSeries pi_count(const ResidueSeries& f, long long x, const FilterSpec& filter,
                     const std::string& label) {
  return pi_count(f, default_grid(x), filter, label);
}

namespace {

// shared least-squares core: fit log(x (loglog x)^h / pi) = alpha loglog x - log c
FitResult fit_with_h(const CountSeries& s, int h) {
  std::vector<double> u, y;
  for (size_t i = 0; i < s.xs.size(); ++i) {
    if (s.counts[i] <= 0 || s.xs[i] < 3) continue;
    double lx = std::log((double)s.xs[i]);
    double llx = std::log(lx);
    u.push_back(llx);
    y.push_back(std::log((double)s.xs[i]) + h * std::log(llx) - std::log((double)s.counts[i]));
  }
  if (u.size() < 5)
    throw InsufficientData("need at least 5 checkpoints with positive counts, have " +
                           std::to_string(u.size()));
  size_t n = u.size();
  double su = 0, sy = 0, suu = 0, suy = 0;
  for (size_t i = 0; i < n; ++i) {
    su += u[i];
    sy += y[i];
    suu += u[i] * u[i];
    suy += u[i] * y[i];
  }
  double var = suu - su * su / n;
  double alpha = (suy - su * sy / n) / var;
  double intercept = (sy - alpha * su) / n;  // = -log c
  FitResult r;
  r.alpha = alpha;
  r.c = std::exp(-intercept);
  double worst = 0;
  for (size_t i = 0; i < n; ++i) {
    double yfit = alpha * u[i] + intercept;
    // pi_fit / pi = exp(y - yfit)
    worst = std::max(worst, std::abs(std::exp(y[i] - yfit) - 1.0));
  }
  r.max_rel_residual = worst;
  r.model_mismatch = worst > kMismatchThreshold;
  return r;
}

}  // namespace

FitResult fit_alpha(const CountSeries& s) { return fit_with_h(s, 0); }

HProbeResult h_probe(const CountSeries& s, int h_max) {
  if (h_max < 0) throw SchemaError("h_max must be nonnegative");
  HProbeResult out;
  double best = -1;
  for (int h = 0; h <= h_max; ++h) {
    FitResult f = fit_with_h(s, h);
    out.scores.push_back(f.max_rel_residual);
    if (best < 0 || f.max_rel_residual < best) {
      best = f.max_rel_residual;
      out.h = h;
      out.best = f;
    }
  }
  return out;
}

namespace {

std::optional<long long> congruence_scan_all(const NewformRecord& fi, const NewformRecord& fj,
                                             const ResidueMapPtr& r, long long N,
                                             long long bound) {
  for (long long n = 1; n <= bound; ++n) {
    if (std::gcd(n, N) != 1) continue;
    if (r->reduce(fi.b(n)) != r->reduce(fj.b(n))) return n;
  }
  return std::nullopt;
}

std::optional<long long> congruence_scan_prime_powers(const NewformRecord& fi,
                                                      const NewformRecord& fj,
                                                      const ResidueMapPtr& r, long long N,
                                                      long long bound) {
  std::optional<long long> best;
  for (long long p = 2; p <= bound; ++p) {
    if (!is_prime_u64((u64)p) || std::gcd(p, N) != 1) continue;
    for (long long pe = p; pe <= bound; pe *= p) {
      if (r->reduce(fi.b(pe)) != r->reduce(fj.b(pe))) {
        if (!best || pe < *best) best = pe;
        break;
      }
      if (pe > bound / p) break;
    }
  }
  return best;
}

}  // namespace

std::optional<long long> eigen_congruence_witness(const FormBundle& bundle, int i, int j,
                                                  const ResidueMapPtr& r, long long bound) {
  if (i < 0 || j < 0 || i >= bundle.size() || j >= bundle.size())
    throw SchemaError("record index out of range");
  const NewformRecord& fi = bundle.forms[i];
  const NewformRecord& fj = bundle.forms[j];
  if (fi.precision() < bound || fj.precision() < bound)
    throw PrecisionTooLow("congruence scan to " + std::to_string(bound) +
                          " exceeds stored precision");
  if (i == j) return std::nullopt;

  auto all = congruence_scan_all(fi, fj, r, bundle.level, bound);
  auto pp = congruence_scan_prime_powers(fi, fj, r, bundle.level, bound);
  // the smallest mismatch index is a prime power by multiplicativity, so the
  // two strategies must find the same witness
  if (all != pp)
    throw InternalCheckError("congruence scans disagree: all-n found " +
                             (all ? std::to_string(*all) : "none") + ", prime powers found " +
                             (pp ? std::to_string(*pp) : "none"));
  return all;
}

bool eigen_congruence_detect(const FormBundle& bundle, int i, int j, const ResidueMapPtr& r,
                             long long bound) {
  return !eigen_congruence_witness(bundle, i, j, r, bound).has_value();
}

namespace {

// dense Gaussian elimination over the residue field; returns a solution of
// A x = b if one exists
std::optional<std::vector<ResidueElt>> solve_mod_l(std::vector<std::vector<ResidueElt>> A,
                                                   std::vector<ResidueElt> b,
                                                   const ResidueMapPtr& map) {
  size_t rows = A.size();
  size_t cols = rows ? A[0].size() : 0;
  std::vector<size_t> pivot_col;
  size_t rank = 0;
  for (size_t c = 0; c < cols && rank < rows; ++c) {
    size_t piv = rank;
    while (piv < rows && A[piv][c].is_zero()) ++piv;
    if (piv == rows) continue;
    std::swap(A[piv], A[rank]);
    std::swap(b[piv], b[rank]);
    ResidueElt inv = A[rank][c].inverse();
    for (size_t cc = c; cc < cols; ++cc) A[rank][cc] = A[rank][cc] * inv;
    b[rank] = b[rank] * inv;
    for (size_t rr = 0; rr < rows; ++rr) {
      if (rr == rank || A[rr][c].is_zero()) continue;
      ResidueElt f = A[rr][c];
      for (size_t cc = c; cc < cols; ++cc) A[rr][cc] = A[rr][cc] - f * A[rank][cc];
      b[rr] = b[rr] - f * b[rank];
    }
    pivot_col.push_back(c);
    ++rank;
  }
  for (size_t rr = rank; rr < rows; ++rr)
    if (!b[rr].is_zero()) return std::nullopt;  // inconsistent
  std::vector<ResidueElt> x(cols, map->zero());
  for (size_t r0 = 0; r0 < rank; ++r0) x[pivot_col[r0]] = b[r0];
  return x;
}

}  // namespace

OldformVerdict oldform_test(const ResidueSeries& f, const FormBundle& bundle,
                            const ResidueMapPtr& r, long long Q, long long scan_bound) {
  if (!f.map()->same_map(*r)) throw RingMismatch("oldform test: residue maps differ");
  if (Q < 1) throw SchemaError("Q must be positive");

  long long scan = std::min(scan_bound, f.precision());
  unsigned h = f.map()->inertia();
  const u64* data = f.data().data();
  for (long long n = 1; n <= scan; ++n) {
    if (std::gcd(n, Q) != 1) continue;
    const u64* row = data + (size_t)n * h;
    bool nonzero = false;
    for (unsigned t = 0; t < h; ++t) nonzero |= (row[t] != 0);
    if (nonzero) {
      OldformVerdict v;
      v.kind = OldformVerdict::Kind::NonvanishingWitness;
      v.witness = n;
      v.detail = "a(f, " + std::to_string(n) + ") != 0 with gcd(n, Q) = 1";
      return v;
    }
  }

  // no witness: try to certify vanishing outright
  mpz_class sturm = sturm_bound_1(f.weight(), mpz_class((long)f.level()));
  long long S = (long long)sturm.get_si();
  if (f.precision() >= S) {
    bool all_zero = true;
    for (long long n = 0; n <= S && all_zero; ++n)
      all_zero = f.a(n).is_zero();
    if (all_zero) {
      OldformVerdict v;
      v.kind = OldformVerdict::Kind::ZeroModEll;
      v.detail = "all coefficients vanish up to the Sturm bound " + std::to_string(S);
      return v;
    }
  }

  long long g = std::gcd(Q, f.level());
  if (g == 1)
    throw Inconclusive("no coprime witness up to " + std::to_string(scan) +
                       " and f does not vanish mod l; gcd(Q, N) = 1 leaves no oldform system");

  // express f as a mod-l combination of dilated bundle records
  std::vector<long long> dilations;
  for (long long d = 2; d <= g; ++d)
    if (g % d == 0) dilations.push_back(d);

  long long rows = f.precision();
  for (const NewformRecord& rec : bundle.forms)
    if (rec.level() != 1) rows = std::min(rows, rec.precision());
  std::vector<std::pair<int, long long>> columns;  // (record, dilation)
  std::vector<ResidueSeries> cols;
  for (int i = 0; i < (int)bundle.size(); ++i) {
    ResidueSeries base = newform_reduced(bundle.forms[i], rows, r);
    for (long long d : dilations) {
      cols.push_back(base.b_delta((u64)d));
      columns.push_back({i, d});
    }
  }
  if (cols.empty())
    throw Inconclusive("no dilated columns available for the oldform system");

  std::vector<std::vector<ResidueElt>> A((size_t)rows + 1,
                                         std::vector<ResidueElt>(cols.size(), r->zero()));
  std::vector<ResidueElt> rhs((size_t)rows + 1, r->zero());
  for (long long n = 0; n <= rows; ++n) {
    for (size_t c = 0; c < cols.size(); ++c) A[(size_t)n][c] = cols[c].a(n);
    rhs[(size_t)n] = f.a(n);
  }
  auto sol = solve_mod_l(std::move(A), std::move(rhs), r);
  if (!sol)
    throw Inconclusive("no coprime witness up to " + std::to_string(scan) +
                       " and the dilated-column system is inconsistent");

  OldformVerdict v;
  v.kind = OldformVerdict::Kind::OldModEll;
  for (size_t c = 0; c < sol->size(); ++c) {
    if ((*sol)[c].is_zero()) continue;
    OldformVerdict::CertTerm t;
    t.label = bundle.forms[columns[c].first].label;
    t.dilation = columns[c].second;
    t.alpha = (*sol)[c];
    v.terms.push_back(std::move(t));
  }
  v.detail = "f is a mod-l combination of " + std::to_string(v.terms.size()) +
             " dilated bundle forms";
  return v;
}

}  // namespace modl
