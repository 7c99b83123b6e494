#include "modl/level1.hpp"

#include <algorithm>
#include <mutex>

#include "modl/conv.hpp"
#include "modl/errors.hpp"

namespace modl {

// ---------- Bernoulli numbers ----------

namespace {
std::vector<mpq_class> g_bernoulli{mpq_class(1)};
std::mutex g_bernoulli_mu;
}  // namespace

mpq_class bernoulli(unsigned n) {
  std::lock_guard<std::mutex> lock(g_bernoulli_mu);
  while (g_bernoulli.size() <= n) {
    // sum_{j=0}^{m} C(m+1, j) B_j = 0 for m >= 1
    unsigned m = (unsigned)g_bernoulli.size();
    mpq_class acc(0);
    mpz_class binom(1);  // C(m+1, 0)
    for (unsigned j = 0; j < m; ++j) {
      acc += mpq_class(binom) * g_bernoulli[j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    mpq_class bm = -acc / mpq_class(binom);  // binom = C(m+1, m) = m+1
    bm.canonicalize();
    g_bernoulli.push_back(bm);
  }
  return g_bernoulli[n];
}

mpq_class bernoulli_generalized(unsigned k, const DirichletCharacter& chi) {
  if (!chi.rational_valued())
    throw RingMismatch("generalized Bernoulli numbers implemented for rational-valued characters");
  long long q = chi.modulus();
  if (q > 1'000'000) throw SchemaError("character modulus too large for Bernoulli computation");
  // B_{k,chi} = q^{k-1} sum_a chi(a) B_k(a/q) = sum_j C(k,j) B_j q^{j-1} S_{k-j},
  // S_t = sum_{a=0}^{q-1} chi(a) a^t
  std::vector<mpq_class> S(k + 1, mpq_class(0));
  for (long long a = 0; a < q; ++a) {
    mpq_class va = chi.rational_value(a);
    if (va == 0) continue;
    mpz_class pw(1);
    for (unsigned t = 0; t <= k; ++t) {
      S[t] += va * mpq_class(pw);
      pw *= (long)a;
    }
  }
  mpq_class acc(0);
  mpz_class binom(1);
  mpq_class qk;  // q^{j-1}
  qk = mpq_class(1, (long)q);
  for (unsigned j = 0; j <= k; ++j) {
    acc += mpq_class(binom) * bernoulli(j) * qk * S[k - j];
    binom = binom * (k - j) / (j + 1);
    qk *= (long)q;
  }
  acc.canonicalize();
  return acc;
}

// ---------- Eisenstein series and Delta ----------

QExpansion eisenstein_Ek(int k, long long B) {
  if (k < 4 || k % 2 != 0) throw SchemaError("eisenstein_Ek needs even k >= 4");
  if (B < 0) throw SchemaError("precision must be >= 0");
  RingPtr Q = NumberRing::rationals();
  // sigma_{k-1} by divisor sieve
  std::vector<mpz_class> sigma(B + 1, mpz_class(0));
  for (long long d = 1; d <= B; ++d) {
    mpz_class dk;
    mpz_ui_pow_ui(dk.get_mpz_t(), d, k - 1);
    for (long long n = d; n <= B; n += d) sigma[n] += dk;
  }
  mpq_class factor = mpq_class(-2 * (long)k) / bernoulli(k);
  factor.canonicalize();
  std::vector<RingElement> c;
  c.reserve(B + 1);
  c.push_back(RingElement::one(Q));
  for (long long n = 1; n <= B; ++n)
    c.push_back(RingElement::from_rational(Q, factor * mpq_class(sigma[n])));
  return QExpansion(k, 1, DirichletCharacter::trivial(1), Q, std::move(c));
}

std::vector<mpz_class> eta_power(unsigned e, long long B) {
  // prod (1-q^n) = sum_j (-1)^j q^{j(3j-1)/2} over all integers j (pentagonal numbers)
  std::vector<mpz_class> pent(B + 1, mpz_class(0));
  pent[0] = 1;
  for (long long j = 1;; ++j) {
    long long p1 = j * (3 * j - 1) / 2, p2 = j * (3 * j + 1) / 2;
    if (p1 > B && p2 > B) break;
    long s = (j % 2 == 0) ? 1 : -1;
    if (p1 <= B) pent[p1] += s;
    if (p2 <= B) pent[p2] += s;
  }
  // square-and-multiply on the exponent's binary digits
  std::vector<mpz_class> result{mpz_class(1)};
  std::vector<mpz_class> base = pent;
  auto mul = [&](const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
    std::vector<mpz_class> r(B + 1, mpz_class(0));
#pragma omp parallel for schedule(dynamic, 64)
    for (long long n = 0; n <= B; ++n) {
      mpz_class acc(0);
      long long lo = std::max<long long>(0, n - (long long)b.size() + 1);
      for (long long i = lo; i < (long long)a.size() && i <= n; ++i) {
        if (a[i] == 0 || b[n - i] == 0) continue;
        acc += a[i] * b[n - i];
      }
      r[n] = std::move(acc);
    }
    return r;
  };
  unsigned rem = e;
  while (rem) {
    if (rem & 1) result = result.size() == 1 && result[0] == 1 ? base : mul(result, base);
    rem >>= 1;
    if (rem) base = mul(base, base);
  }
  result.resize(B + 1, mpz_class(0));
  return result;
}

QExpansion delta(long long B) {
  if (B < 0) throw SchemaError("precision must be >= 0");
  RingPtr Q = NumberRing::rationals();
  std::vector<RingElement> c(B + 1, RingElement::zero(Q));
  if (B >= 1) {
    std::vector<mpz_class> eta24 = eta_power(24, B - 1);
    for (long long n = 1; n <= B; ++n)
      c[n] = RingElement::from_rational(Q, mpq_class(eta24[n - 1]));
  }
  return QExpansion(12, 1, DirichletCharacter::trivial(1), Q, std::move(c));
}

// ---------- dimensions and Victor-Miller basis ----------

long long dim_Mk_level1(int k) {
  if (k < 0 || k % 2 != 0) return 0;
  if (k % 12 == 2) return k / 12;
  return k / 12 + 1;
}

long long dim_Sk_level1(int k) {
  if (k < 12) return 0;
  return dim_Mk_level1(k) - 1;
}

namespace {
// E_w as a product of E4 and E6 powers for w in {0,4,6,8,10,14}
QExpansion small_eisenstein(int w, long long B) {
  RingPtr Q = NumberRing::rationals();
  if (w == 0) {
    QExpansion one = QExpansion::zero(0, 1, Q, B);
    one.set(0, RingElement::one(Q));
    return one;
  }
  QExpansion e4 = eisenstein_Ek(4, B), e6 = eisenstein_Ek(6, B);
  switch (w) {
    case 4: return e4;
    case 6: return e6;
    case 8: return e4 * e4;
    case 10: return e4 * e6;
    case 14: return e4 * e4 * e6;
  }
  throw InternalCheckError("small_eisenstein: unexpected weight " + std::to_string(w));
}
}  // namespace

std::vector<QExpansion> victor_miller_basis(int k, long long B) {
  if (k < 4 || k % 2 != 0) throw SchemaError("victor_miller_basis needs even k >= 4");
  long long d = dim_Mk_level1(k);
  if (B < d - 1) throw PrecisionTooLow("basis echelonization needs precision >= dim-1");
  int e = k % 12;
  if (e == 2) e += 12;  // 14 = 12 + 2
  QExpansion dl = delta(B);
  QExpansion e62 = eisenstein_Ek(6, B);
  e62 = e62 * e62;
  QExpansion ee = small_eisenstein(e, B);
  std::vector<QExpansion> g(d, QExpansion());
  // j-th ladder element Delta^j E6^{2(d-1-j)} E_e has weight k, leading term q^j
  QExpansion acc = ee;
  for (long long j = d - 1; j >= 0; --j) {
    g[j] = acc.with_weight(k);
    if (j > 0) acc = acc * e62;
  }
  QExpansion dpow = QExpansion::zero(0, 1, dl.ring(), B);
  dpow.set(0, RingElement::one(dl.ring()));
  for (long long j = 0; j < d; ++j) {
    if (j > 0) dpow = dpow * dl;
    g[j] = (g[j] * dpow).with_weight(k);
  }
  // back-substitute into echelon form: a(g_i, j) = delta_{ij}
  for (long long j = d - 2; j >= 0; --j)
    for (long long i = j + 1; i < d; ++i) {
      RingElement cij = g[j].a(i);
      if (!cij.is_zero()) g[j] = g[j] - g[i].scalar_mul(cij);
    }
  return g;
}

std::vector<ResidueSeries> victor_miller_basis_reduced(int k, long long B,
                                                       const ResidueMapPtr& map) {
  if (k < 4 || k % 2 != 0) throw SchemaError("victor_miller_basis needs even k >= 4");
  long long d = dim_Mk_level1(k);
  if (B < d - 1) throw PrecisionTooLow("basis echelonization needs precision >= dim-1");
  ResidueSeries dl = delta_reduced(B, map);
  auto small_reduced = [&](int w) -> ResidueSeries {
    if (w == 0) {
      ResidueSeries one(0, 1, DirichletCharacter::trivial(1), map, B);
      one.set(0, map->one());
      return one;
    }
    ResidueSeries e4 = eisenstein_Ek_reduced(4, B, map);
    switch (w) {
      case 4: return e4;
      case 6: return eisenstein_Ek_reduced(6, B, map);
      case 8: return e4 * e4;
      case 10: return e4 * eisenstein_Ek_reduced(6, B, map);
      case 14: return e4 * e4 * eisenstein_Ek_reduced(6, B, map);
    }
    throw InternalCheckError("small_eisenstein: unexpected weight " + std::to_string(w));
  };
  int e = k % 12;
  if (e == 2) e += 12;
  ResidueSeries e62 = eisenstein_Ek_reduced(6, B, map);
  e62 = e62 * e62;
  std::vector<ResidueSeries> g(d, ResidueSeries(0, 1, DirichletCharacter::trivial(1), map, B));
  ResidueSeries acc = small_reduced(e);
  for (long long j = d - 1; j >= 0; --j) {
    g[j] = acc.with_weight(k);
    if (j > 0) acc = acc * e62;
  }
  ResidueSeries dpow(0, 1, DirichletCharacter::trivial(1), map, B);
  dpow.set(0, map->one());
  for (long long j = 0; j < d; ++j) {
    if (j > 0) dpow = dpow * dl;
    g[j] = (g[j] * dpow).with_weight(k);
  }
  for (long long j = d - 2; j >= 0; --j)
    for (long long i = j + 1; i < d; ++i) {
      ResidueElt cij = g[j].a(i);
      if (!cij.is_zero()) g[j] = g[j] - g[i].scalar_mul(cij);
    }
  return g;
}

ResidueSeries eisenstein_Ek_reduced(int k, long long B, const ResidueMapPtr& map) {
  if (k < 4 || k % 2 != 0) throw SchemaError("eisenstein_Ek needs even k >= 4");
  u64 ell = map->ell();
  std::vector<u64> sigma(B + 1, 0);
  for (long long d = 1; d <= B; ++d) {
    u64 dk = powmod((u64)d % ell, (u64)(k - 1), ell);
    if (dk == 0) continue;
    for (long long n = d; n <= B; n += d) sigma[n] = addmod(sigma[n], dk, ell);
  }
  mpq_class factor = mpq_class(-2 * (long)k) / bernoulli(k);
  factor.canonicalize();
  ResidueElt fr = map->from_mpq(factor);
  ResidueSeries r(k, 1, DirichletCharacter::trivial(1), map, B);
  r.set(0, map->one());
  for (long long n = 1; n <= B; ++n) r.set(n, fr * map->from_u64(sigma[n]));
  return r;
}

ResidueSeries delta_reduced(long long B, const ResidueMapPtr& map) {
  u64 ell = map->ell();
  ResidueSeries r(12, 1, DirichletCharacter::trivial(1), map, B);
  if (B < 1) return r;
  long long Bp = B - 1;
  std::vector<u64> pent(Bp + 1, 0);
  pent[0] = 1 % ell;
  for (long long j = 1;; ++j) {
    long long p1 = j * (3 * j - 1) / 2, p2 = j * (3 * j + 1) / 2;
    if (p1 > Bp && p2 > Bp) break;
    u64 s = (j % 2 == 0) ? 1 % ell : ell - 1;
    if (p1 <= Bp) pent[p1] = addmod(pent[p1], s, ell);
    if (p2 <= Bp) pent[p2] = addmod(pent[p2], s, ell);
  }
  size_t out_len = (size_t)Bp + 1;
  std::vector<u64> acc{1 % ell};
  std::vector<u64> base = pent;
  unsigned rem = 24;
  while (rem) {
    if (rem & 1) acc = conv_mod(acc, base, ell, out_len);
    rem >>= 1;
    if (rem) base = conv_mod(base, base, ell, out_len);
  }
  acc.resize(out_len, 0);
  // eta(q)^24 shifted by one: works coefficientwise since inertia coords are plain u64
  if (map->inertia() == 1) {
    for (long long n = 1; n <= B; ++n) r.set(n, map->from_u64(acc[n - 1]));
  } else {
    for (long long n = 1; n <= B; ++n) {
      std::vector<u64> c(map->inertia(), 0);
      c[0] = acc[n - 1];
      r.set(n, map->from_coords(std::move(c)));
    }
  }
  return r;
}

// ---------- eigenforms ----------

namespace {
std::string cusp_label(int k, long long N, unsigned i) {
  std::string suffix;
  unsigned v = i;
  do {
    suffix.insert(suffix.begin(), char('a' + v % 26));
    v /= 26;
  } while (v);
  return std::to_string(k) + "." + std::to_string(N) + "." + suffix;
}
}  // namespace

std::vector<NewformRecord> eigenforms(int k, long long B) {
  if (k < 12 || k % 2 != 0) throw SchemaError("native eigenforms need even k >= 12");
  long long dS = dim_Sk_level1(k);
  if (B < std::max<long long>(2 * dS, 4))
    throw PrecisionTooLow("eigenforms need precision >= 2*dim to read off T_2");
  std::vector<NewformRecord> out;
  RingPtr Q = NumberRing::rationals();
  RingPtr bundle_ring = Q;

  std::vector<QExpansion> vm = victor_miller_basis(k, B);
  // cusp part of the echelon basis: vm[1..dS] with a(vm[i], j) = delta_{ij}
  if (dS == 1) {
    NewformRecord rec;
    rec.label = cusp_label(k, 1, 0);
    rec.form = vm[1];
    out.push_back(std::move(rec));
  } else if (dS == 2) {
    // T_2 matrix in the echelon coordinates, read off initial coefficients
    QExpansion t2f1 = vm[1].hecke_Tp(2), t2f2 = vm[2].hecke_Tp(2);
    mpq_class m11 = t2f1.a(1).rational_value(), m12 = t2f2.a(1).rational_value();
    mpq_class m21 = t2f1.a(2).rational_value(), m22 = t2f2.a(2).rational_value();
    mpq_class tr = m11 + m22, det = m11 * m22 - m12 * m21;
    if (tr.get_den() != 1 || det.get_den() != 1)
      throw InternalCheckError("T_2 matrix not integral in the echelon basis");
    mpz_class t = tr.get_num(), n = det.get_num();
    mpz_class disc = t * t - 4 * n;
    if (disc == 0) throw FactorDegreeTooHigh("T_2 has a repeated eigenvalue at weight " +
                                              std::to_string(k));
    auto [s, rest] = square_part(disc);
    std::vector<RingElement> lambdas;
    RingPtr K;
    if (rest == 1) {
      // rational eigenvalues (t +- s)/2, smaller first
      K = Q;
      mpq_class l1 = mpq_class(t - s) / 2, l2 = mpq_class(t + s) / 2;
      l1.canonicalize();
      l2.canonicalize();
      lambdas.push_back(RingElement::from_rational(K, l1));
      lambdas.push_back(RingElement::from_rational(K, l2));
    } else if (rest > 1) {
      // eigenvalues (t -+ s*theta)/2 in Z[theta]/(theta^2 - rest), minus-branch first
      K = NumberRing::quadratic(rest);
      mpq_class half(1, 2);
      RingElement th = RingElement::theta(K);
      RingElement base = RingElement::from_rational(K, mpq_class(t) * half);
      RingElement dev = th * (mpq_class(s) * half);
      lambdas.push_back(base - dev);
      lambdas.push_back(base + dev);
    } else {
      throw FactorDegreeTooHigh("T_2 characteristic polynomial has complex roots at weight " +
                                std::to_string(k));
    }
    bundle_ring = K;
    // eigenform = f1 + lambda*f2 in echelon coordinates (its own initial coefficients)
    for (unsigned i = 0; i < 2; ++i) {
      std::vector<RingElement> c;
      c.reserve(B + 1);
      for (long long m = 0; m <= B; ++m) {
        mpq_class v1 = vm[1].a(m).rational_value(), v2 = vm[2].a(m).rational_value();
        c.push_back(RingElement::from_rational(K, v1) + lambdas[i] * mpq_class(v2));
      }
      NewformRecord rec;
      rec.label = cusp_label(k, 1, i);
      rec.form = QExpansion(k, 1, DirichletCharacter::trivial(1), K, std::move(c));
      // internal sanity: T_2 f = lambda f to the available precision
      QExpansion t2f = rec.form.hecke_Tp(2);
      QExpansion lf = rec.form.truncate(B / 2).scalar_mul(lambdas[i]);
      for (long long m = 0; m <= B / 2; ++m)
        if (t2f.a(m) != lf.a(m))
          throw VerificationFailed("constructed eigenform is not a T_2 eigenvector");
      out.push_back(std::move(rec));
    }
  } else if (dS != 0) {
    throw FactorDegreeTooHigh("native eigenform extraction handles dim <= 2, got " +
                              std::to_string(dS));
  }

  // Eisenstein record: E_k normalized to b(1) = 1, so b(n) = sigma_{k-1}(n)
  {
    std::vector<mpz_class> sigma(B + 1, mpz_class(0));
    for (long long d = 1; d <= B; ++d) {
      mpz_class dk;
      mpz_ui_pow_ui(dk.get_mpz_t(), d, k - 1);
      for (long long n = d; n <= B; n += d) sigma[n] += dk;
    }
    std::vector<RingElement> c;
    c.reserve(B + 1);
    mpq_class a0 = -bernoulli(k) / (2 * (long)k);
    a0.canonicalize();
    // keep the whole bundle over the cusp coefficient ring
    c.push_back(RingElement::from_rational(bundle_ring, a0));
    for (long long n = 1; n <= B; ++n)
      c.push_back(RingElement::from_rational(bundle_ring, mpq_class(sigma[n])));
    NewformRecord rec;
    rec.label = std::to_string(k) + ".1.eis";
    rec.is_eisenstein = true;
    rec.form = QExpansion(k, 1, DirichletCharacter::trivial(1), bundle_ring, std::move(c));
    out.push_back(std::move(rec));
  }
  return out;
}

NewformRecord eisenstein_newform(const DirichletCharacter& chi1, const DirichletCharacter& chi2,
                                 int k, long long B) {
  if (k < 1) throw SchemaError("weight must be >= 1");
  bool oddk = k % 2 == 1;
  if ((chi1.is_odd() != chi2.is_odd()) != oddk)
    throw ParityMismatch("chi1*chi2(-1) = " + std::string((chi1.is_odd() != chi2.is_odd()) ? "-1" : "+1") +
                         " but (-1)^k = " + (oddk ? "-1" : "+1"));
  RingPtr R = chi1.ring();
  if (R->is_rational() && !chi2.ring()->is_rational()) R = chi2.ring();
  if (!chi1.ring()->is_rational() && !chi2.ring()->is_rational())
    require_same_ring(chi1.ring(), chi2.ring(), "eisenstein_newform");
  auto embed = [&](const RingElement& v) {
    if (v.ring()->same_ring(*R)) return v;
    return RingElement::from_rational(R, v.rational_value());
  };
  std::vector<RingElement> c(B + 1, RingElement::zero(R));
  // b(n) = sum_{d|n} chi1(n/d) chi2(d) d^{k-1}, accumulated by a divisor sieve
  for (long long d = 1; d <= B; ++d) {
    RingElement x2 = embed(chi2.value(d));
    if (x2.is_zero()) continue;
    mpz_class dk;
    mpz_ui_pow_ui(dk.get_mpz_t(), d, k - 1);
    RingElement term = x2 * mpq_class(dk);
    for (long long n = d; n <= B; n += d) {
      RingElement x1 = embed(chi1.value(n / d));
      if (!x1.is_zero()) c[n] += x1 * term;
    }
  }
  // constant term delta_{1,chi1} L(1-k, chi1)
  if (chi1.is_principal() && chi1.modulus() == 1) {
    mpq_class L = -bernoulli_generalized(k, chi1) / (long)k;
    L.canonicalize();
    c[0] = RingElement::from_rational(R, L);
  }
  NewformRecord rec;
  long long level = chi1.modulus() * chi2.modulus();
  rec.label = std::to_string(k) + "." + std::to_string(level) + ".eis." + chi1.name() + "." +
              chi2.name();
  rec.is_eisenstein = true;
  rec.form = QExpansion(k, level, chi1 * chi2, R, std::move(c));
  return rec;
}

ResidueSeries newform_reduced(const NewformRecord& rec, long long B, const ResidueMapPtr& map) {
  if (rec.level() == 1 && !rec.is_eisenstein) {
    long long dS = dim_Sk_level1(rec.weight());
    std::vector<ResidueSeries> vm = victor_miller_basis_reduced(rec.weight(), B, map);
    // echelon coordinates of a normalized eigenform are its own initial coefficients
    ResidueSeries F(rec.weight(), 1, DirichletCharacter::trivial(1), map, B);
    for (long long i = 1; i <= dS; ++i) {
      ResidueElt bi = map->reduce(rec.b(i));
      if (!bi.is_zero()) F = F + vm[i].scalar_mul(bi);
    }
    return F;
  }
  if (rec.level() == 1 && rec.is_eisenstein) {
    // normalized coefficients are sigma_{k-1}(n); sieve them directly mod l
    int k = rec.weight();
    u64 ell = map->ell();
    std::vector<u64> sigma(B + 1, 0);
    for (long long d = 1; d <= B; ++d) {
      u64 dk = powmod((u64)d % ell, (u64)(k - 1), ell);
      if (dk == 0) continue;
      for (long long n = d; n <= B; n += d) sigma[n] = addmod(sigma[n], dk, ell);
    }
    ResidueSeries r(k, 1, DirichletCharacter::trivial(1), map, B);
    r.set(0, map->reduce(rec.b(0)));
    for (long long n = 1; n <= B; ++n) r.set(n, map->from_u64(sigma[n]));
    return r;
  }
  if (B > rec.precision())
    throw PrecisionTooLow("record " + rec.label + " stores precision " +
                          std::to_string(rec.precision()) + ", requested " + std::to_string(B));
  return ResidueSeries::reduce_of(rec.form.truncate(B), map);
}

}  // namespace modl
