#include "modl/siegel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "modl/errors.hpp"
#include "modl/intutil.hpp"
#include "modl/jsonio.hpp"

namespace modl {

using nlohmann::json;

// ---------- SiegelKey ----------

namespace {

size_t tri_size(int n) { return (size_t)n * (n + 1) / 2; }

size_t tri_idx(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return (size_t)i * n - (size_t)i * (i - 1) / 2 + (size_t)(j - i);
}

// dense mpz copy of 2T
std::vector<std::vector<mpz_class>> dense2t(const SiegelKey& t) {
  int n = t.degree();
  std::vector<std::vector<mpz_class>> a(n, std::vector<mpz_class>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = (long)t.two_t(i, j);
  return a;
}

// exact determinant by fraction-free (Bareiss) elimination
mpz_class det_mpz(std::vector<std::vector<mpz_class>> a) {
  int n = (int)a.size();
  if (n == 0) return 1;
  mpz_class prev = 1;
  int sign = 1;
  for (int c = 0; c < n - 1; ++c) {
    int piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      sign = -sign;
    }
    for (int i = c + 1; i < n; ++i)
      for (int j = c + 1; j < n; ++j) {
        a[i][j] = a[c][c] * a[i][j] - a[i][c] * a[c][j];
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
    prev = a[c][c];
  }
  return sign * a[n - 1][n - 1];
}

mpz_class principal_minor(const std::vector<std::vector<mpz_class>>& a,
                          const std::vector<int>& rows) {
  int m = (int)rows.size();
  std::vector<std::vector<mpz_class>> sub(m, std::vector<mpz_class>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) sub[i][j] = a[rows[i]][rows[j]];
  return det_mpz(std::move(sub));
}

}  // namespace

SiegelKey::SiegelKey(int degree, std::vector<long long> upper_2t) : n_(degree), u_(std::move(upper_2t)) {
  if (n_ < 1) throw SchemaError("matrix degree must be >= 1");
  if (u_.size() != tri_size(n_))
    throw SchemaError("upper triangle of a degree-" + std::to_string(n_) + " matrix needs " +
                      std::to_string(tri_size(n_)) + " entries, got " + std::to_string(u_.size()));
  for (int i = 0; i < n_; ++i)
    if (two_t(i, i) % 2 != 0)
      throw NotHalfIntegral("diagonal entry " + std::to_string(two_t(i, i)) +
                            " of 2T is odd; T would not have an integral diagonal");
}

SiegelKey SiegelKey::from_abc(long long t11, long long two_t12, long long t22) {
  return SiegelKey(2, {2 * t11, two_t12, 2 * t22});
}

SiegelKey SiegelKey::from_diag(const std::vector<long long>& t_diag) {
  int n = (int)t_diag.size();
  std::vector<long long> u(tri_size(n), 0);
  for (int i = 0; i < n; ++i) u[tri_idx(n, i, i)] = 2 * t_diag[i];
  return SiegelKey(n, std::move(u));
}

SiegelKey SiegelKey::pad(const SiegelKey& s) {
  int n = s.degree() + 1;
  std::vector<long long> u(tri_size(n), 0);
  for (int i = 0; i < s.degree(); ++i)
    for (int j = i; j < s.degree(); ++j) u[tri_idx(n, i, j)] = s.two_t(i, j);
  return SiegelKey(n, std::move(u));
}

long long SiegelKey::two_t(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw SchemaError("matrix index out of range");
  return u_[tri_idx(n_, i, j)];
}

long long SiegelKey::t_diag(int i) const { return two_t(i, i) / 2; }

long long SiegelKey::m_norm() const {
  long long m = t_diag(0);
  for (int i = 1; i < n_; ++i) m = std::max(m, t_diag(i));
  return m;
}

long long SiegelKey::trace_t() const {
  long long s = 0;
  for (int i = 0; i < n_; ++i) s += t_diag(i);
  return s;
}

mpz_class SiegelKey::det2() const { return det_mpz(dense2t(*this)); }

mpq_class SiegelKey::det_t() const {
  mpz_class two_n = 1;
  two_n <<= n_;
  mpq_class q(det2(), two_n);
  q.canonicalize();
  return q;
}

std::optional<mpz_class> SiegelKey::det_t_int() const {
  mpq_class d = det_t();
  if (d.get_den() != 1) return std::nullopt;
  return mpz_class(d.get_num());
}

long long SiegelKey::content() const {
  long long g = 0;
  for (int i = 0; i < n_; ++i) {
    g = std::gcd(g, t_diag(i));
    for (int j = i + 1; j < n_; ++j) g = std::gcd(g, two_t(i, j));
  }
  if (g == 0) throw ZeroMatrix("content of the zero matrix");
  return g < 0 ? -g : g;
}

long long SiegelKey::dcal() const {
  if (n_ < 2) throw SchemaError("Dcal needs degree >= 2");
  long long g = 0;
  for (int i = 1; i < n_; ++i) g = std::gcd(g, t_diag(i));
  g = g < 0 ? -g : g;
  bool zero = std::all_of(u_.begin(), u_.end(), [](long long v) { return v == 0; });
  if (!zero && g != 0 && g % content() != 0)
    throw InternalCheckError("content does not divide the diagonal gcd");
  return g;
}

int SiegelKey::rank() const {
  auto a = dense2t(*this);
  int n = n_, rank = 0;
  std::vector<std::vector<mpq_class>> m(n, std::vector<mpq_class>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i][j] = mpq_class(a[i][j]);
  for (int c = 0, r = 0; c < n && r < n; ++c) {
    int piv = r;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) continue;
    std::swap(m[piv], m[r]);
    for (int i = r + 1; i < n; ++i) {
      if (m[i][c] == 0) continue;
      mpq_class f = m[i][c] / m[r][c];
      for (int j = c; j < n; ++j) m[i][j] -= f * m[r][j];
    }
    ++r;
    ++rank;
  }
  return rank;
}

bool SiegelKey::is_psd() const {
  // nonnegativity of the leading principal minors is not enough for
  // semi-definiteness (diag(0, -1)); check every principal minor
  auto a = dense2t(*this);
  for (unsigned mask = 1; mask < (1u << n_); ++mask) {
    std::vector<int> rows;
    for (int i = 0; i < n_; ++i)
      if (mask & (1u << i)) rows.push_back(i);
    if (principal_minor(a, rows) < 0) return false;
  }
  return true;
}

bool SiegelKey::is_positive_definite() const {
  auto a = dense2t(*this);
  std::vector<int> rows;
  for (int i = 0; i < n_; ++i) {
    rows.push_back(i);
    if (principal_minor(a, rows) <= 0) return false;
  }
  return true;
}

SiegelKey SiegelKey::transform(const std::vector<std::vector<long long>>& U) const {
  if ((int)U.size() != n_) throw SchemaError("transform: U has wrong size");
  for (const auto& row : U)
    if ((int)row.size() != n_) throw SchemaError("transform: U has wrong size");
  auto a = dense2t(*this);
  // 2T[U] = U^t (2T) U
  std::vector<std::vector<mpz_class>> b(n_, std::vector<mpz_class>(n_, 0));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) b[i][j] += a[i][k] * (long)U[k][j];
  std::vector<long long> u(tri_size(n_));
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) {
      mpz_class v = 0;
      for (int k = 0; k < n_; ++k) v += mpz_class((long)U[k][i]) * b[k][j];
      if (!v.fits_slong_p()) throw SchemaError("transform: entry overflow");
      u[tri_idx(n_, i, j)] = v.get_si();
    }
  return SiegelKey(n_, std::move(u));
}

SiegelKey SiegelKey::lower_right() const {
  if (n_ < 2) throw SchemaError("lower_right needs degree >= 2");
  int m = n_ - 1;
  std::vector<long long> u(tri_size(m));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) u[tri_idx(m, i, j)] = two_t(i + 1, j + 1);
  return SiegelKey(m, std::move(u));
}

std::vector<long long> SiegelKey::first_row_off() const {
  std::vector<long long> mu;
  for (int j = 1; j < n_; ++j) mu.push_back(two_t(0, j));
  return mu;
}

bool SiegelKey::operator<(const SiegelKey& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  return u_ < o.u_;
}

std::string SiegelKey::to_string() const {
  std::ostringstream out;
  out << "[";
  for (int i = 0; i < n_; ++i) {
    if (i) out << "; ";
    for (int j = 0; j < n_; ++j) {
      if (j) out << " ";
      long long v = two_t(i, j);
      if (i == j)
        out << v / 2;
      else if (v % 2 == 0)
        out << v / 2;
      else
        out << v << "/2";
    }
  }
  out << "]";
  return out.str();
}

// ---------- SiegelExpansion ----------

SiegelExpansion::SiegelExpansion(int degree, int weight, long long level, RingPtr ring,
                                 long long b_supp)
    : n_(degree), k_(weight), N_(level), ring_(std::move(ring)), b_(b_supp) {
  if (n_ < 1) throw SchemaError("degree must be >= 1");
  if (N_ < 1) throw SchemaError("level must be >= 1");
  if (b_ < 0) throw SchemaError("support bound must be >= 0");
  if (!ring_) throw SchemaError("expansion needs a coefficient ring");
  zero_ = RingElement::zero(ring_);
}

bool SiegelExpansion::in_box(const SiegelKey& t) const {
  return t.degree() == n_ && t.m_norm() <= b_ && t.is_psd();
}

void SiegelExpansion::set(const SiegelKey& t, RingElement v) {
  if (t.degree() != n_) throw SchemaError("key degree does not match the table");
  if (!t.is_psd())
    throw NotPositiveDefinite("key " + t.to_string() + " is not positive semi-definite");
  if (t.m_norm() > b_)
    throw SchemaError("key " + t.to_string() + " lies outside the declared support box");
  if (v.is_zero())
    tab_.erase(t);
  else
    tab_[t] = std::move(v);
}

const RingElement& SiegelExpansion::at(const SiegelKey& t) const {
  if (t.degree() != n_) throw SchemaError("key degree does not match the table");
  if (!in_box(t))
    throw KeyMissing("key " + t.to_string() + " is outside the support box (bound " +
                     std::to_string(b_) + ")");
  auto it = tab_.find(t);
  return it == tab_.end() ? zero_ : it->second;
}

bool SiegelExpansion::has(const SiegelKey& t) const { return tab_.count(t) != 0; }

void validate_gl_invariance(const SiegelExpansion& f) {
  if (f.degree() != 2) return;  // generator check is native to degree 2
  static const std::vector<std::vector<long long>> S = {{0, 1}, {-1, 0}};
  static const std::vector<std::vector<long long>> T1 = {{1, 1}, {0, 1}};
  for (const auto& [key, val] : f.table()) {
    for (const auto& U : {S, T1}) {
      SiegelKey img = key.transform(U);
      if (!f.in_box(img)) continue;
      if (f.at(img) != val)
        throw InvarianceViolation("a_F differs at " + key.to_string() + " and its transform " +
                                  img.to_string());
    }
  }
}

// ---------- JSON ----------

std::string siegel_to_json(const SiegelExpansion& f) {
  json j;
  j["degree"] = f.degree();
  j["weight"] = f.weight();
  j["level"] = f.level();
  j["ring_minpoly"] = minpoly_to_json(f.ring());
  j["b_supp"] = f.b_supp();
  json entries = json::array();
  for (const auto& [key, val] : f.table()) {
    json e;
    e["t2"] = key.upper();
    e["a"] = coords_to_json(val);
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  return j.dump(1);
}

void save_siegel(const SiegelExpansion& f, const std::string& path) {
  save_text_file(path, siegel_to_json(f));
}

SiegelExpansion load_siegel(const std::string& path, bool skip_validation) {
  json j = load_json_file(path);
  try {
    int n = (int)json_to_mpz(j.at("degree")).get_si();
    int k = (int)json_to_mpz(j.at("weight")).get_si();
    long long N = (long long)json_to_mpz(j.at("level")).get_si();
    RingPtr ring = ring_from_minpoly_json(j.at("ring_minpoly"));
    if (!j.contains("entries") || !j["entries"].is_array())
      throw SchemaError(path + ": missing entries array");

    std::vector<std::pair<SiegelKey, RingElement>> entries;
    long long max_m = 0;
    for (const auto& e : j["entries"]) {
      if (!e.contains("t2") || !e["t2"].is_array())
        throw SchemaError(path + ": entry without t2 key");
      std::vector<long long> u;
      for (const auto& v : e["t2"]) u.push_back((long long)json_to_mpz(v).get_si());
      SiegelKey key(n, std::move(u));  // NotHalfIntegral propagates as-is
      RingElement val = coords_from_json(e.at("a"), ring);
      max_m = std::max(max_m, key.m_norm());
      entries.emplace_back(std::move(key), std::move(val));
    }
    long long b_supp = j.contains("b_supp") ? (long long)json_to_mpz(j["b_supp"]).get_si() : max_m;

    SiegelExpansion f(n, k, N, ring, b_supp);
    for (auto& [key, val] : entries) {
      if (f.has(key)) throw SchemaError(path + ": duplicate key " + key.to_string());
      try {
        f.set(key, std::move(val));
      } catch (const NotPositiveDefinite& ex) {
        throw SchemaError(path + ": " + ex.what());
      }
    }
    if (!skip_validation && N == 1) validate_gl_invariance(f);
    return f;
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

// ---------- Sturm bound ----------

long long sturm_bound_n(int n, int k, const mpz_class& N, const mpz_class& index_override) {
  if (n < 1) throw SchemaError("degree must be >= 1");
  if (k < 1) throw SchemaError("weight must be >= 1");
  if (N < 1) throw SchemaError("level must be >= 1");
  mpq_class index;
  if (index_override > 0) {
    index = mpq_class(index_override);
  } else if (N == 1) {
    index = 1;
  } else if (n == 1) {
    index = mpq_class(gamma1_index(N));
  } else if (n == 2) {
    // documented stand-in for the degree-2 congruence-subgroup index:
    // N^3 prod_{p | N} (1 - p^-2)(1 - p^-4)
    index = mpq_class(N * N * N);
    for (const auto& [p, e] : factor_mpz(N)) {
      (void)e;
      mpz_class p2 = p * p, p4 = p2 * p2;
      index *= mpq_class(p2 - 1, p2);
      index *= mpq_class(p4 - 1, p4);
      index.canonicalize();
    }
  } else {
    throw SchemaError("no built-in index formula for degree >= 3 at level > 1; "
                      "pass an explicit index");
  }
  // ceil((4/3)^n (k/16) * index)
  mpz_class four_n = 1, three_n = 1;
  for (int i = 0; i < n; ++i) {
    four_n *= 4;
    three_n *= 3;
  }
  mpq_class val = mpq_class(four_n * k) / mpq_class(three_n * 16) * index;
  val.canonicalize();
  mpz_class c = ceil_div(val.get_num(), val.get_den());
  return (long long)c.get_si();
}

// ---------- GL2 reduction ----------

SiegelKey gl2_reduce(const SiegelKey& t) {
  if (t.degree() != 2) throw SchemaError("gl2_reduce needs a degree-2 key");
  if (!t.is_positive_definite())
    throw NotPositiveDefinite("gl2_reduce: " + t.to_string() + " is not positive definite");
  // Gauss reduction on 2T = [[A, B], [B, C]]: alternate translations
  // [[1, q], [0, 1]] and swaps until 0 <= B <= A <= C
  long long A = t.two_t(0, 0), B = t.two_t(0, 1), C = t.two_t(1, 1);
  for (;;) {
    long long r = ((B % A) + A) % A;  // balance B into (-A/2, A/2]
    if (2 * r > A) r -= A;
    long long q = (r - B) / A;
    C += q * (A * q + 2 * B);
    B = r < 0 ? -r : r;  // diag(1, -1) lies in GL_2(Z): merge the sign classes
    if (A > C) {
      std::swap(A, C);
      continue;
    }
    break;
  }
  return SiegelKey(2, {A, B, C});
}

bool gl_equivalent(const SiegelKey& a, const SiegelKey& b) {
  if (a.degree() != b.degree()) return false;
  if (a.degree() == 1) return a == b;
  return gl2_reduce(a) == gl2_reduce(b);
}

// ---------- singular rank ----------

int singular_rank(const SiegelExpansion& f, const ResidueMapPtr& r) {
  int best = -1;
  for (const auto& [key, val] : f.table())
    if (!r->reduce(val).is_zero()) best = std::max(best, key.rank());
  if (best < 0) throw AllCoefficientsVanish("the table vanishes mod l");
  return best;
}

bool weight_congruence_check(int k, int t, unsigned long long ell) {
  if (ell < 2) throw SchemaError("ell must be prime");
  long long v = 2LL * k - t;
  long long m = (long long)ell - 1;
  return ((v % m) + m) % m == 0;
}

// ---------- diagonal restriction ----------

namespace {

// T = T0 mod R as a lattice congruence: T - T0 in R * (half-integral matrices)
bool key_congruent(const SiegelKey& a, const SiegelKey& b, long long R) {
  int n = a.degree();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      long long d = a.two_t(i, j) - b.two_t(i, j);
      long long mod = (i == j) ? 2 * R : R;
      if (((d % mod) + mod) % mod != 0) return false;
    }
  return true;
}

}  // namespace

QExpansion diagonal_restrict(const SiegelExpansion& f, const SiegelKey& t0, long long R,
                             long long prec) {
  if (R < 1) throw SchemaError("R must be >= 1");
  if (t0.degree() != f.degree()) throw SchemaError("key degree does not match the table");
  if (!f.in_box(t0))
    throw KeyMissing("restriction base key " + t0.to_string() + " is outside the support box");
  if (prec < 0) prec = f.b_supp();
  if (prec > f.b_supp())
    throw SupportTooSmall("restriction to precision " + std::to_string(prec) +
                          " exceeds the support bound " + std::to_string(f.b_supp()));

  long long NR2 = f.level() * R * R;
  std::vector<RingElement> coeffs((size_t)prec + 1, RingElement::zero(f.ring()));
  int n = f.degree();
  for (const auto& [key, val] : f.table()) {
    long long r = key.t_diag(0);
    if (r > prec) continue;
    bool tail = true;
    for (int i = 1; i < n && tail; ++i) tail = key.t_diag(i) == t0.t_diag(i);
    if (!tail || !key_congruent(key, t0, R)) continue;
    coeffs[(size_t)r] += val;
  }
  return QExpansion(f.weight(), NR2, DirichletCharacter::trivial(NR2), f.ring(),
                    std::move(coeffs));
}

long long choose_R(const SiegelExpansion& f, const SiegelKey& t0, int k, long long N) {
  if (!f.in_box(t0)) throw KeyMissing("key " + t0.to_string() + " is outside the support box");
  long long dc = t0.dcal();
  mpz_class S = sturm_bound_1(k, mpz_class((long)N) * (long)N);
  mpz_class Rz = (2 * S + 1) * (long)dc + 1;
  if (!Rz.fits_slong_p()) throw SchemaError("separation modulus overflows");
  long long R = Rz.get_si();
  if (std::gcd(R, dc) != 1)
    throw InternalCheckError("separation modulus shares a factor with the diagonal gcd");
  // the class of T0 must isolate T0 among stored keys with the same diagonal;
  // bump R (keeping R = 1 mod dcal) past any collision. Off-diagonal entries of
  // keys in the box differ by at most 4*b_supp, so the loop terminates.
  for (bool collided = true; collided;) {
    collided = false;
    for (const auto& [key, val] : f.table()) {
      (void)val;
      if (key == t0) continue;
      bool same_diag = true;
      for (int i = 0; i < f.degree() && same_diag; ++i) same_diag = key.t_diag(i) == t0.t_diag(i);
      if (same_diag && key_congruent(key, t0, R)) {
        collided = true;
        break;
      }
    }
    if (collided) {
      if (R > 4 * f.b_supp() + (long long)dc)
        throw InternalCheckError("separation modulus search failed to terminate");
      R += dc;
    }
  }
  return R;
}

// ---------- trace twist ----------

SiegelExpansion twist_by_trace(const SiegelExpansion& f,
                               const std::vector<std::vector<long long>>& L, long long N,
                               bool strict) {
  int n = f.degree();
  if ((int)L.size() != n) throw NotSymmetric("twist matrix has wrong size");
  for (const auto& row : L)
    if ((int)row.size() != n) throw NotSymmetric("twist matrix has wrong size");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (L[i][j] != L[j][i]) throw NotSymmetric("twist matrix is not symmetric");
  if (N < 1) throw SchemaError("twist modulus must be >= 1");
  if (strict) {
    if (((L[0][0] % N) + N) % N != 0)
      throw SchemaError("strict twist needs L_11 = 0 mod N");
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (((L[i][j] % N) + N) % N != 0)
          throw SchemaError("strict twist needs off-diagonal L = 0 mod N");
  }

  SiegelExpansion g(n, f.weight(), N * N, f.ring(), f.b_supp());
  for (const auto& [key, val] : f.table()) {
    long long tr = 0;
    for (int i = 0; i < n; ++i) tr += L[i][i] * key.t_diag(i);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) tr += L[i][j] * key.two_t(i, j);
    if (std::gcd(tr < 0 ? -tr : tr, N) == 1) g.set(key, val);
  }
  return g;
}

// ---------- Fourier-Jacobi ----------

JacobiSlice fourier_jacobi(const SiegelExpansion& f, const SiegelKey& s) {
  if (f.degree() < 2) throw SchemaError("slicing needs degree >= 2");
  if (s.degree() != f.degree() - 1) throw SchemaError("slice index has wrong degree");
  if (s.m_norm() > f.b_supp())
    throw IndexNotInSupport("slice index " + s.to_string() + " lies outside the support box");
  JacobiSlice slice{s, f.weight(), f.level(), f.ring(), f.b_supp(), {}};
  for (const auto& [key, val] : f.table()) {
    if (!(key.lower_right() == s)) continue;
    slice.table[{key.t_diag(0), key.first_row_off()}] = val;
  }
  return slice;
}

JacobiSlice fourier_jacobi(const SiegelExpansion& f, long long m) {
  if (f.degree() != 2) throw SchemaError("scalar slice index applies to degree 2 only");
  return fourier_jacobi(f, SiegelKey(1, {2 * m}));
}

RingElement JacobiSlice::at(long long r, const std::vector<long long>& mu) const {
  if (r > b_supp)
    throw IndexNotInSupport("Jacobi coefficient at r = " + std::to_string(r) +
                            " is outside the support bound " + std::to_string(b_supp));
  if (r < 0) return RingElement::zero(ring);  // never psd, so an exact zero
  auto it = table.find({r, mu});
  if (it != table.end()) return it->second;
  // inside the box, absent keys (including non-psd assemblies) are exact zeros
  return RingElement::zero(ring);
}

RingElement JacobiSlice::at(long long r, long long mu) const {
  return at(r, std::vector<long long>{mu});
}

std::map<long long, ThetaComponent> theta_components(const JacobiSlice& slice) {
  if (slice.index.degree() != 1)
    throw SchemaError("theta components are native to degree-2 slices");
  long long m = slice.m();
  if (m < 1) throw SchemaError("theta components need a positive slice index");

  std::map<long long, ThetaComponent> comps;
  for (long long mu0 = 0; mu0 < 2 * m; ++mu0) {
    ThetaComponent h;
    h.m = m;
    h.mu0 = mu0;
    h.weight = slice.weight;
    h.level = slice.level;
    h.ring = slice.ring;
    h.denom = 4 * m;
    long long bal = std::min(mu0, 2 * m - mu0);  // representative of least square
    h.max_exponent = 4 * m * slice.b_supp - bal * bal;
    comps.emplace(mu0, std::move(h));
  }

  for (const auto& [key, val] : slice.table) {
    long long r = key.first;
    long long mu = key.second.at(0);
    long long mu0 = ((mu % (2 * m)) + 2 * m) % (2 * m);
    long long e = 4 * m * r - mu * mu;
    ThetaComponent& h = comps.at(mu0);
    auto it = h.coeff.find(e);
    if (it != h.coeff.end()) {
      // two entries of the same class and exponent must carry one value
      if (it->second != val)
        throw InternalCheckError("theta split is inconsistent at (r, mu) = (" +
                                 std::to_string(r) + ", " + std::to_string(mu) + ")");
    } else if (!val.is_zero()) {
      h.coeff.emplace(e, val);
    }
  }

  // reconstruction identity b(r, mu) = h_{mu mod 2m}[4mr - mu^2]
  for (const auto& [key, val] : slice.table) {
    long long r = key.first;
    long long mu = key.second.at(0);
    long long mu0 = ((mu % (2 * m)) + 2 * m) % (2 * m);
    long long e = 4 * m * r - mu * mu;
    const auto& h = comps.at(mu0);
    auto it = h.coeff.find(e);
    RingElement back = it == h.coeff.end() ? RingElement::zero(slice.ring) : it->second;
    if (back != val) throw InternalCheckError("theta reconstruction failed");
  }
  return comps;
}

JacobiSlice primitive_subseries(const JacobiSlice& slice) {
  bool zero_index = true;
  for (int i = 0; i < slice.index.degree() && zero_index; ++i)
    for (int j = i; j < slice.index.degree() && zero_index; ++j)
      zero_index = slice.index.two_t(i, j) == 0;
  long long cs = zero_index ? 0 : slice.index.content();

  auto keep = [&](long long r, const std::vector<long long>& mu) {
    long long g = std::gcd(r, cs);
    for (long long v : mu) g = std::gcd(g, v < 0 ? -v : v);
    return g == 1;
  };

  JacobiSlice out = slice;
  out.table.clear();
  for (const auto& [key, val] : slice.table)
    if (keep(key.first, key.second)) out.table[key] = val;

  // the gcd condition is invariant under (r, mu) -> (r + L.mu + S[L], mu + 2SL),
  // so invariance of the input survives the filtering; spot-check translates
  if (slice.index.degree() == 1) {
    long long m = slice.m();
    for (const auto& [key, val] : out.table) {
      long long r = key.first, mu = key.second.at(0);
      for (long long L = -2; L <= 2; ++L) {
        if (L == 0) continue;
        long long r2 = r + L * mu + m * L * L;
        long long mu2 = mu + 2 * m * L;
        if (r2 < 0 || r2 > out.b_supp) continue;
        if (out.at(r2, mu2) != val)
          throw InternalCheckError("index invariance broken after the primitive filter at (" +
                                   std::to_string(r) + ", " + std::to_string(mu) + ")");
      }
    }
  }
  return out;
}

SiegelExpansion phi_operator(const SiegelExpansion& f) {
  if (f.degree() < 2) throw SchemaError("Phi needs degree >= 2");
  int n = f.degree();
  SiegelExpansion out(n - 1, f.weight(), f.level(), f.ring(), f.b_supp());
  for (const auto& [key, val] : f.table()) {
    bool last_zero = true;
    for (int i = 0; i < n && last_zero; ++i) last_zero = key.two_t(i, n - 1) == 0;
    if (!last_zero) continue;
    std::vector<long long> u(tri_size(n - 1));
    for (int i = 0; i + 1 < n; ++i)
      for (int j = i; j + 1 < n; ++j) u[tri_idx(n - 1, i, j)] = key.two_t(i, j);
    out.set(SiegelKey(n - 1, std::move(u)), val);
  }
  return out;
}

EllipticCarrier h_to_elliptic(const ThetaComponent& h, long long d) {
  if (d == 0) d = 2 * h.m;  // det(2S) for the scalar index S = (m)
  if (d < 1) throw SchemaError("normalizer must be positive");
  long long denom = 4 * h.m;
  long long prec = (d * h.max_exponent) / denom;
  QExpansion series = QExpansion::zero(h.weight, 16 * d * d * h.level, h.ring, std::max(prec, 0LL));
  for (const auto& [e, val] : h.coeff) {
    if ((d * e) % denom != 0)
      throw IndexMismatch("exponent " + std::to_string(e) + " does not map to an integer index " +
                          "under d = " + std::to_string(d));
    series.set((d * e) / denom, val);
  }
  EllipticCarrier out;
  out.series = std::move(series);
  out.kappa = mpq_class(2 * h.weight - 1, 2);
  out.d = d;
  return out;
}

// ---------- counters ----------

namespace {

std::vector<int> spf_sieve_ll(long long B) {
  std::vector<int> spf((size_t)B + 1, 0);
  for (long long i = 2; i <= B; ++i) {
    if (spf[(size_t)i] != 0) continue;
    for (long long j = i; j <= B; j += i)
      if (spf[(size_t)j] == 0) spf[(size_t)j] = (int)i;
  }
  return spf;
}

CountSeries hits_to_series(const std::vector<char>& hit, long long x, const FilterSpec& filter,
                           const std::string& label, const ResidueMapPtr& r) {
  CountSeries out;
  out.filter = filter.descriptor();
  out.label = label;
  out.ell = r->label();
  long long acc = 0;
  for (long long d = 1; d <= x; ++d) {
    acc += hit[(size_t)d] ? 1 : 0;
    out.xs.push_back(d);
    out.counts.push_back(acc);
  }
  return out;
}

FilterSpec with_odd_convention(FilterSpec f) {
  if (f.kind == FilterSpec::Kind::SquareFree || f.kind == FilterSpec::Kind::Prime)
    f.odd_only = true;
  return f;
}

void require_degree2(const SiegelExpansion& f, const char* what) {
  if (f.degree() != 2) throw SchemaError(std::string(what) + " is native to degree 2");
}

}  // namespace

CountSeries count_det(const SiegelExpansion& f, const ResidueMapPtr& r, long long x,
                      const FilterSpec& filter) {
  require_degree2(f, "det counting");
  if (x < 1) throw SchemaError("x must be >= 1");
  if (x > f.b_supp())
    throw SupportInsufficientFor("det counting to " + std::to_string(x) +
                                     " needs support through " + std::to_string(x),
                                 f.b_supp());
  FilterSpec eff = with_odd_convention(filter);
  std::vector<int> spf;
  if (eff.kind == FilterSpec::Kind::SquareFree || eff.kind == FilterSpec::Kind::Prime)
    spf = spf_sieve_ll(x);

  std::vector<char> hit((size_t)x + 1, 0);
  for (long long a = 1; a <= x; ++a) {
    for (long long c = a; c <= x; ++c) {
      for (long long b2 = 0; b2 <= a; b2 += 1) {
        long long det2 = 4 * a * c - b2 * b2;
        if (det2 % 4 != 0) continue;  // half-integral determinant, never an integer d
        long long d = det2 / 4;
        if (d < 1 || d > x) continue;
        if (!eff.admits(d, spf) || hit[(size_t)d]) continue;
        if (!r->reduce(f.at(SiegelKey::from_abc(a, b2, c))).is_zero()) hit[(size_t)d] = 1;
      }
    }
  }
  return hits_to_series(hit, x, eff, "det", r);
}

CountSeries count_det_naive(const SiegelExpansion& f, const ResidueMapPtr& r, long long x,
                            const FilterSpec& filter) {
  require_degree2(f, "det counting");
  if (x < 1) throw SchemaError("x must be >= 1");
  if (x > f.b_supp())
    throw SupportInsufficientFor("det counting to " + std::to_string(x) +
                                     " needs support through " + std::to_string(x),
                                 f.b_supp());
  FilterSpec eff = with_odd_convention(filter);
  std::vector<int> spf;
  if (eff.kind == FilterSpec::Kind::SquareFree || eff.kind == FilterSpec::Kind::Prime)
    spf = spf_sieve_ll(x);

  // every positive-definite key in the box, reduced or not
  std::vector<char> hit((size_t)x + 1, 0);
  long long B = f.b_supp();
  for (long long a = 1; a <= B; ++a) {
    for (long long c = 1; c <= B; ++c) {
      for (long long b2 = -2 * B; b2 <= 2 * B; ++b2) {
        long long det2 = 4 * a * c - b2 * b2;
        if (det2 <= 0 || det2 % 4 != 0) continue;
        long long d = det2 / 4;
        if (d < 1 || d > x) continue;
        if (!eff.admits(d, spf) || hit[(size_t)d]) continue;
        if (!r->reduce(f.at(SiegelKey::from_abc(a, b2, c))).is_zero()) hit[(size_t)d] = 1;
      }
    }
  }
  return hits_to_series(hit, x, eff, "det", r);
}

CountSeries count_trace(const SiegelExpansion& f, const ResidueMapPtr& r, long long x) {
  require_degree2(f, "trace counting");
  if (x < 1) throw SchemaError("x must be >= 1");
  if (x > f.b_supp() + 1)
    throw SupportInsufficientFor("trace counting to " + std::to_string(x) +
                                     " needs support through " + std::to_string(x - 1),
                                 f.b_supp() + 1);
  // trace is not a class invariant: enumerate every positive-definite T with
  // a + c <= x directly (all lie in the box since a, c <= x - 1 <= b_supp)
  std::vector<char> hit((size_t)x + 1, 0);
  for (long long a = 1; a < x; ++a) {
    for (long long c = 1; a + c <= x; ++c) {
      if (hit[(size_t)(a + c)]) continue;
      for (long long b2 = 0; b2 * b2 < 4 * a * c; ++b2) {
        bool nz = !r->reduce(f.at(SiegelKey::from_abc(a, b2, c))).is_zero();
        if (!nz && b2 > 0) nz = !r->reduce(f.at(SiegelKey::from_abc(a, -b2, c))).is_zero();
        if (nz) {
          hit[(size_t)(a + c)] = 1;
          break;
        }
      }
    }
  }
  return hits_to_series(hit, x, FilterSpec::none(), "trace", r);
}

CountSeries count_trace_naive(const SiegelExpansion& f, const ResidueMapPtr& r, long long x) {
  require_degree2(f, "trace counting");
  if (x < 1) throw SchemaError("x must be >= 1");
  if (x > f.b_supp() + 1)
    throw SupportInsufficientFor("trace counting to " + std::to_string(x) +
                                     " needs support through " + std::to_string(x - 1),
                                 f.b_supp() + 1);
  std::vector<char> hit((size_t)x + 1, 0);
  long long B = f.b_supp();
  for (long long a = 1; a <= B; ++a) {
    for (long long c = 1; c <= B; ++c) {
      if (a + c > x) continue;
      for (long long b2 = -2 * B; b2 <= 2 * B; ++b2) {
        SiegelKey key(2, {2 * a, b2, 2 * c});
        if (!key.is_positive_definite()) continue;
        if (hit[(size_t)(a + c)]) break;
        if (!r->reduce(f.at(key)).is_zero()) hit[(size_t)(a + c)] = 1;
      }
    }
  }
  return hits_to_series(hit, x, FilterSpec::none(), "trace", r);
}

std::vector<SiegelKey> primitive_classes(const SiegelExpansion& f, const ResidueMapPtr& r,
                                         long long det_bound) {
  require_degree2(f, "class enumeration");
  if (det_bound < 1) throw SchemaError("det bound must be >= 1");
  if (det_bound > f.b_supp())
    throw SupportInsufficientFor("class enumeration to det " + std::to_string(det_bound) +
                                     " needs support through " + std::to_string(det_bound),
                                 f.b_supp());
  std::vector<SiegelKey> out;
  for (long long a = 1; a <= det_bound; ++a)
    for (long long c = a; c <= det_bound; ++c)
      for (long long b2 = 0; b2 <= a; ++b2) {
        long long det2 = 4 * a * c - b2 * b2;
        if (det2 <= 0 || det2 > 4 * det_bound) continue;  // det(T) = det2/4
        SiegelKey key = SiegelKey::from_abc(a, b2, c);
        if (!key.is_primitive()) continue;
        if (r->reduce(f.at(key)).is_zero()) continue;
        out.push_back(key);
      }
  std::sort(out.begin(), out.end(), [](const SiegelKey& p, const SiegelKey& q) {
    mpz_class dp = p.det2(), dq = q.det2();
    if (dp != dq) return dp < dq;
    return p < q;
  });
  return out;
}

std::vector<std::vector<long long>> random_unimodular(int n, std::mt19937_64& rng, int steps) {
  std::vector<std::vector<long long>> U(n, std::vector<long long>(n, 0));
  for (int i = 0; i < n; ++i) U[i][i] = 1;
  for (int s = 0; s < steps; ++s) {
    int op = (int)(rng() % 3);
    int i = (int)(rng() % n);
    int j = (int)(rng() % n);
    if (op == 0 && i != j) {
      long long c = (rng() % 2) ? 1 : -1;
      for (int t = 0; t < n; ++t) U[i][t] += c * U[j][t];
    } else if (op == 1 && i != j) {
      std::swap(U[i], U[j]);
    } else {
      for (int t = 0; t < n; ++t) U[i][t] = -U[i][t];
    }
  }
  return U;
}

}  // namespace modl
