#include "modl/sieve.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "json.hpp"
#include "modl/errors.hpp"
#include "modl/intutil.hpp"
#include "modl/jsonio.hpp"
#include "modl/level1.hpp"

namespace modl {

using nlohmann::json;

// ---------- decomposition ----------

bool Decomposition::is_zero_at(int i) const {
  for (const RingElement& c : alpha.at((size_t)i))
    if (!c.is_zero()) return false;
  return true;
}

namespace {

std::vector<long long> divisors_of(long long n) {
  std::vector<long long> out;
  for (long long d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    out.push_back(d);
    if (d != n / d) out.push_back(n / d);
  }
  std::sort(out.begin(), out.end());
  return out;
}

long long sturm_ll(int k, long long N) {
  mpz_class s = sturm_bound_1(k, mpz_class((long)N));
  if (!s.fits_slong_p()) throw SchemaError("Sturm bound overflows a machine word");
  return (long long)s.get_si();
}

}  // namespace

Decomposition decompose(const QExpansion& f, const FormBundle& bundle) {
  if (bundle.size() == 0) throw SchemaError("decompose needs a nonempty bundle");
  require_same_ring(f.ring(), bundle.ring, "decompose");
  if (f.weight() != bundle.weight)
    throw WeightMismatch("f has weight " + std::to_string(f.weight()) + ", bundle has " +
                         std::to_string(bundle.weight));
  long long N = f.level();
  if (bundle.level < 1 || N % bundle.level != 0)
    throw SchemaError("the bundle level must divide the level of f");

  Decomposition out;
  out.bundle = &bundle;
  out.divisors.resize(bundle.size());
  long long unknowns = 0;
  for (size_t i = 0; i < (size_t)bundle.size(); ++i) {
    long long Ni = bundle.forms[i].level();
    if (Ni < 1 || N % Ni != 0)
      throw SchemaError("record " + bundle.forms[i].label + " has level " + std::to_string(Ni) +
                        " not dividing " + std::to_string(N));
    out.divisors[i] = divisors_of(N / Ni);
    unknowns += (long long)out.divisors[i].size();
  }

  // rows 0..bound: past the Sturm bound agreement of the first coefficients
  // pins the decomposition; the extra rows buy a built-in consistency check
  long long bound = std::max(sturm_ll(f.weight(), N), unknowns) + 8;
  if (f.precision() < bound)
    throw PrecisionTooLow("decompose needs a(f, n) through n = " + std::to_string(bound) +
                          ", have " + std::to_string(f.precision()));
  std::vector<std::pair<int, long long>> columns;  // (record, dilation)
  for (size_t i = 0; i < (size_t)bundle.size(); ++i)
    for (long long delta : out.divisors[i]) {
      if (bundle.forms[i].precision() < bound / delta)
        throw PrecisionTooLow("record " + bundle.forms[i].label + " stores " +
                              std::to_string(bundle.forms[i].precision()) +
                              " coefficients; the dilation system needs " +
                              std::to_string(bound / delta));
      columns.push_back({(int)i, delta});
    }

  // exact dense system over the coefficient field: rows n, columns (i, delta),
  // entry a(f_i, n / delta) when delta | n, else 0; rhs a(f, n)
  long long m = (long long)columns.size();
  long long rows = bound + 1;
  RingElement zero = RingElement::zero(f.ring());
  std::vector<std::vector<RingElement>> A((size_t)rows,
                                          std::vector<RingElement>((size_t)m + 1, zero));
  for (long long n = 0; n < rows; ++n) {
    for (long long c = 0; c < m; ++c) {
      auto [i, delta] = columns[(size_t)c];
      if (n % delta == 0) A[(size_t)n][(size_t)c] = bundle.forms[(size_t)i].b(n / delta);
    }
    A[(size_t)n][(size_t)m] = f.a(n);
  }

  // Gaussian elimination with exact field arithmetic
  long long rank = 0;
  for (long long col = 0; col < m && rank < rows; ++col) {
    long long piv = rank;
    while (piv < rows && A[(size_t)piv][(size_t)col].is_zero()) ++piv;
    if (piv == rows) continue;
    std::swap(A[(size_t)piv], A[(size_t)rank]);
    for (long long rr = rank + 1; rr < rows; ++rr) {
      if (A[(size_t)rr][(size_t)col].is_zero()) continue;
      RingElement fac = A[(size_t)rr][(size_t)col] / A[(size_t)rank][(size_t)col];
      for (long long cc = col; cc <= m; ++cc)
        A[(size_t)rr][(size_t)cc] = A[(size_t)rr][(size_t)cc] - fac * A[(size_t)rank][(size_t)cc];
    }
    ++rank;
  }
  if (rank < m)
    throw SingularSystem("the dilation system does not determine the coefficients uniquely");
  for (long long rr = rank; rr < rows; ++rr)
    if (!A[(size_t)rr][(size_t)m].is_zero())
      throw SingularSystem("f does not lie in the span of the dilated bundle forms");

  // rank == m forces pivot c in column c: back-substitute
  std::vector<RingElement> x((size_t)m, zero);
  for (long long c = m - 1; c >= 0; --c) {
    RingElement acc = A[(size_t)c][(size_t)m];
    for (long long cc = c + 1; cc < m; ++cc)
      acc = acc - A[(size_t)c][(size_t)cc] * x[(size_t)cc];
    x[(size_t)c] = acc / A[(size_t)c][(size_t)c];
  }

  out.alpha.resize(bundle.size());
  for (long long c = 0; c < m; ++c) out.alpha[(size_t)columns[(size_t)c].first].push_back(x[(size_t)c]);

  // residual: every further coefficient both sides can evaluate must agree
  long long vmax = f.precision();
  for (long long c = 0; c < m; ++c) {
    auto [i, delta] = columns[(size_t)c];
    vmax = std::min(vmax, delta * bundle.forms[(size_t)i].precision());
  }
  for (long long n = bound + 1; n <= vmax; ++n) {
    RingElement acc = zero;
    for (long long c = 0; c < m; ++c) {
      auto [i, delta] = columns[(size_t)c];
      if (n % delta == 0) acc = acc + x[(size_t)c] * bundle.forms[(size_t)i].b(n / delta);
    }
    if (acc != f.a(n))
      throw ResidualNonzero("the solved decomposition disagrees with f at n = " +
                            std::to_string(n));
  }
  out.verified_upto = vmax;
  return out;
}

std::vector<int> support_set(const Decomposition& d) {
  std::vector<int> out;
  for (size_t i = 0; i < d.alpha.size(); ++i)
    if (!d.is_zero_at((int)i)) out.push_back((int)i);
  return out;
}

// ---------- admissible primes ----------

long long AdmissibleSet::at(int i, int j) const {
  if (i == j) throw SchemaError("no admissible prime for a pair (i, i)");
  auto it = q.find({std::min(i, j), std::max(i, j)});
  if (it == q.end())
    throw SchemaError("no admissible prime stored for the pair (" + std::to_string(i) + ", " +
                      std::to_string(j) + ")");
  return it->second;
}

AdmissibleSet admissible_set(const FormBundle& bundle, const std::vector<int>& support,
                             long long M, AdmissibleMode mode) {
  if (M < 1) throw SchemaError("the coprimality modulus must be >= 1");
  std::vector<int> supp = support;
  std::sort(supp.begin(), supp.end());
  supp.erase(std::unique(supp.begin(), supp.end()), supp.end());
  for (int i : supp)
    if (i < 0 || i >= (int)bundle.size()) throw SchemaError("support index out of range");

  AdmissibleSet out;
  out.mode = mode;
  out.M = M;
  out.support = supp;

  std::set<long long> used;
  for (size_t s = 0; s < supp.size(); ++s) {
    for (size_t t = s + 1; t < supp.size(); ++t) {
      int i = supp[s], j = supp[t];
      const NewformRecord& fi = bundle.forms[(size_t)i];
      const NewformRecord& fj = bundle.forms[(size_t)j];
      long long limit = std::min(fi.precision(), fj.precision());
      long long found = 0;
      for (long long p = 2; p <= limit; p = (long long)next_prime_above((u64)p)) {
        if (std::gcd(p, M) != 1) continue;
        if (mode == AdmissibleMode::Distinct && used.count(p)) continue;
        if (fi.b(p) != fj.b(p)) {
          found = p;
          break;
        }
      }
      if (!found)
        throw PrecisionExhausted("no admissible prime below " + std::to_string(limit) +
                                 " separates " + fi.label + " and " + fj.label);
      out.q[{i, j}] = found;
      if (mode == AdmissibleMode::Distinct) used.insert(found);
    }
  }
  return out;
}

RingElement script_L(const FormBundle& bundle, const AdmissibleSet& a) {
  RingElement out = RingElement::one(bundle.ring);
  for (int i : a.support)
    for (int j : a.support) {
      if (i == j) continue;
      long long p = a.at(i, j);
      out = out * (bundle.forms[(size_t)i].b(p) - bundle.forms[(size_t)j].b(p));
    }
  return out;
}

RingElement script_L_row(const FormBundle& bundle, const AdmissibleSet& a, int i0) {
  if (std::find(a.support.begin(), a.support.end(), i0) == a.support.end())
    throw SchemaError("row index " + std::to_string(i0) + " is not in the support");
  RingElement out = RingElement::one(bundle.ring);
  for (int j : a.support) {
    if (j == i0) continue;
    long long p = a.at(i0, j);
    out = out * (bundle.forms[(size_t)i0].b(p) - bundle.forms[(size_t)j].b(p));
  }
  return out;
}

// ---------- effective lower bound ----------

mpz_class ell_lower_bound(int k, long long N, long long M, int s, unsigned d, unsigned h,
                          AdmissibleMode mode, const AdmissibleSet* witnessed) {
  if (k < 1) throw SchemaError("weight must be >= 1");
  if (N < 1 || M < 1) throw SchemaError("levels must be >= 1");
  if (d == 0 || h == 0) throw SchemaError("field degrees must be positive");
  if (s <= 1) return ceil_pow_rational(4, d, h);

  unsigned long pairs = (unsigned long)s * ((unsigned long)s - 1) / 2;
  mpz_class W = 1;
  if (witnessed) {
    if (witnessed->q.size() != pairs)
      throw SchemaError("the witnessed admissible set covers " +
                        std::to_string(witnessed->q.size()) + " pairs, expected " +
                        std::to_string(pairs));
    for (const auto& [ij, p] : witnessed->q) {
      (void)ij;
      W *= (long)p;
    }
  } else if (mode == AdmissibleMode::Shared) {
    // worst case: every pair prime is at most the Sturm bound at level M^2
    mpz_class S = sturm_bound_1(k, mpz_class((long)M) * (long)M);
    mpz_pow_ui(W.get_mpz_t(), S.get_mpz_t(), pairs);
  } else {
    // distinct primes: each new prime is at most the Sturm bound of the level
    // inflated by the squares of the earlier ones
    mpz_class L = mpz_class((long)N) * (long)M * (long)M;
    for (unsigned long t = 0; t < pairs; ++t) {
      mpz_class P = sturm_bound_1(k, L);
      W *= P;
      L *= P * P;
    }
  }

  mpz_class base;
  mpz_pow_ui(base.get_mpz_t(), W.get_mpz_t(), (unsigned long)(k - 1));
  base *= 16;
  return ceil_pow_rational(base, d, 2UL * h);
}

bool check_l_integrality(const Decomposition& d, const ResidueMapPtr& r) {
  for (const auto& row : d.alpha)
    for (const RingElement& c : row) {
      try {
        r->reduce(c);
      } catch (const DenominatorNotCoprime&) {
        return false;
      }
    }
  return true;
}

// ---------- the sieve ----------

std::string SieveRelation::to_json() const {
  json j;
  j["target_label"] = target_label;
  j["target_index"] = target_index;
  j["delta"] = delta;
  j["factor"] = coords_to_json(factor);
  j["ell"] = ell;
  j["map"] = map_label;
  j["verified_upto"] = verified_upto;
  json ts = json::array();
  for (const SieveTerm& t : terms) {
    json e;
    e["beta"] = coords_to_json(t.beta);
    e["gamma"] = mpq_to_string(t.gamma);
    ts.push_back(std::move(e));
  }
  j["terms"] = std::move(ts);
  return j.dump(1);
}

namespace {

// alpha counts as surviving when it is visibly nonzero mod l, including the
// case where it cannot even be reduced: a denominator at l forces a pole,
// which is in particular not zero
bool survives_mod_l(const RingElement& alpha, const ResidueMapPtr& r) {
  try {
    return !r->reduce(alpha).is_zero();
  } catch (const DenominatorNotCoprime&) {
    return true;
  }
}

void add_term(std::map<mpq_class, RingElement>& m, const mpq_class& g, const RingElement& v) {
  auto it = m.find(g);
  if (it == m.end())
    m.emplace(g, v);
  else
    it->second = it->second + v;
}

}  // namespace

SieveRelation extract_newform_relation(const QExpansion& f, const FormBundle& bundle,
                                       const Decomposition& d, const AdmissibleSet& a,
                                       const ResidueMapPtr& r, long long Q, long long verify_bound,
                                       const ResidueSeries* f_hi) {
  if (d.alpha.size() != (size_t)bundle.size())
    throw SchemaError("the decomposition does not match the bundle");
  require_same_ring(f.ring(), bundle.ring, "extract_newform_relation");
  require_same_ring(r->ring(), f.ring(), "extract_newform_relation");
  if (Q < 1) throw SchemaError("Q must be >= 1");
  if (f_hi) require_same_map(f_hi->map(), r, "extract_newform_relation");

  int k = f.weight();
  long long N = f.level();
  RingElement zero = RingElement::zero(f.ring());

  // 1) f must be nonconstant mod l out to the Sturm bound
  long long S = sturm_ll(k, N);
  long long scan = std::min(S, f.precision());
  bool nonconstant = false;
  for (long long n = 1; n <= scan && !nonconstant; ++n) {
    try {
      nonconstant = !r->reduce(f.a(n)).is_zero();
    } catch (const DenominatorNotCoprime&) {
      nonconstant = true;  // a pole at l is not zero
    }
  }
  if (!nonconstant) {
    if (scan < S)
      throw PrecisionTooLow("need a(f, n) through the Sturm bound " + std::to_string(S) +
                            " to certify nonconstancy");
    throw ConstantModEll("f is constant mod " + r->label() + " up to the Sturm bound");
  }

  // 2) surviving columns and the leading surviving index i0
  std::vector<std::vector<char>> surv(d.alpha.size());
  int i0 = -1;
  for (size_t i = 0; i < d.alpha.size(); ++i) {
    surv[i].resize(d.alpha[i].size(), 0);
    for (size_t j = 0; j < d.alpha[i].size(); ++j) {
      surv[i][j] = survives_mod_l(d.alpha[i][j], r) ? 1 : 0;
      if (surv[i][j] && i0 < 0) i0 = (int)i;
    }
  }
  if (i0 < 0)
    throw InternalCheckError("f is nonconstant mod l yet every decomposition coefficient "
                             "vanishes mod l");
  std::vector<int> others;
  for (size_t i = 0; i < surv.size(); ++i) {
    if ((int)i == i0) continue;
    if (std::any_of(surv[i].begin(), surv[i].end(), [](char c) { return c != 0; }))
      others.push_back((int)i);
  }

  // 3) the row obstruction at i0 over the surviving companions
  RingElement lead = RingElement::one(f.ring());
  for (int j : others) {
    long long p = a.at(i0, j);
    lead = lead * (bundle.forms[(size_t)i0].b(p) - bundle.forms[(size_t)j].b(p));
  }
  if (!survives_mod_l(lead, r))
    throw ScriptLVanishes("the obstruction row at " + bundle.forms[(size_t)i0].label +
                          " vanishes mod " + r->label());

  // 4) every solved coefficient must be l-integral
  if (!check_l_integrality(d, r))
    throw NotLIntegral("a decomposition coefficient has a denominator at l");

  // 5) the dilation carried by the target: smallest surviving divisor at i0
  long long Delta = 0;
  RingElement alpha_ref = zero;
  for (size_t j = 0; j < surv[(size_t)i0].size(); ++j)
    if (surv[(size_t)i0][j]) {
      Delta = d.divisors[(size_t)i0][j];
      alpha_ref = d.alpha[(size_t)i0][j];
      break;
    }

  // 6) eliminate the companions: apply prod_j (T_{q_j} - b_j(q_j)) as a formal
  // sum of index dilations gamma with a(T_q g, n) = a(g, qn) + chi(q) q^{k-1}
  // a(g, n/q)
  std::map<mpq_class, RingElement> formal;
  formal.emplace(mpq_class(1), RingElement::one(f.ring()));
  for (int j : others) {
    long long p = a.at(i0, j);
    RingElement bj = bundle.forms[(size_t)j].b(p);
    mpz_class pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), (unsigned long)p, (unsigned long)(k - 1));
    RingElement shift =
        f.character().value_in(f.ring(), p) * RingElement::from_rational(f.ring(), mpq_class(pk));
    std::map<mpq_class, RingElement> next;
    for (const auto& [g, c] : formal) {
      add_term(next, g * mpq_class((long)p), c);
      add_term(next, g / mpq_class((long)p), c * shift);
      add_term(next, g, zero - c * bj);
    }
    formal = std::move(next);
  }

  SieveRelation rel;
  rel.target_index = i0;
  rel.target_label = bundle.forms[(size_t)i0].label;
  rel.delta = Delta;
  rel.factor = lead * alpha_ref;
  rel.ell = r->ell();
  rel.map_label = r->label();
  for (const auto& [g, c] : formal)
    if (!c.is_zero()) rel.terms.push_back({c / rel.factor, g});
  std::sort(rel.terms.begin(), rel.terms.end(),
            [](const SieveTerm& u, const SieveTerm& v) { return u.gamma > v.gamma; });

  // 7) verify the congruence on every admissible index the data can reach
  long long avail = f_hi ? f_hi->precision() : f.precision();
  mpq_class gmax(0);
  for (const SieveTerm& t : rel.terms) gmax = std::max(gmax, t.gamma);
  mpq_class cap = mpq_class((long)avail) / (gmax * mpq_class((long)Delta));
  long long n_cap = (long long)mpz_class(cap.get_num() / cap.get_den()).get_si();
  const NewformRecord& tgt = bundle.forms[(size_t)i0];
  long long lhs_cap = tgt.level() == 1 ? verify_bound : tgt.precision();
  long long n_max = std::min({verify_bound, n_cap, lhs_cap});
  rel.verified_upto = 0;
  if (n_max >= 1) {
    ResidueSeries lhs = newform_reduced(tgt, n_max, r);
    std::vector<ResidueElt> rbeta;
    for (const SieveTerm& t : rel.terms) rbeta.push_back(r->reduce(t.beta));
    for (long long n = 1; n <= n_max; ++n) {
      if (std::gcd(n, Q) != 1 || std::gcd(n, N) != 1) continue;
      ResidueElt acc = r->zero();
      for (size_t t = 0; t < rel.terms.size(); ++t) {
        mpq_class x = rel.terms[t].gamma * mpq_class((long)Delta) * mpq_class((long)n);
        if (x.get_den() != 1) continue;  // a(f, *) vanishes at fractional indices
        long long mth = (long long)mpz_class(x.get_num()).get_si();
        ResidueElt val = f_hi ? f_hi->a(mth) : r->reduce(f.a(mth));
        acc += rbeta[t] * val;
      }
      if (acc != lhs.a(n))
        throw VerificationFailed("the emitted relation fails at n = " + std::to_string(n));
      rel.verified_upto = n;
    }
  }
  return rel;
}

}  // namespace modl
