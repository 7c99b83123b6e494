#include "modl/ingest.hpp"

#include <algorithm>

#include "json.hpp"
#include "modl/errors.hpp"
#include "modl/intutil.hpp"
#include "modl/jsonio.hpp"

namespace modl {

using nlohmann::json;

namespace {

// smallest-prime-factor sieve for index factorization up to B
std::vector<long long> spf_table(long long B) {
  std::vector<long long> spf(B + 1, 0);
  for (long long i = 2; i <= B; ++i) {
    if (spf[i] != 0) continue;
    for (long long j = i; j <= B; j += i)
      if (spf[j] == 0) spf[j] = i;
  }
  return spf;
}

}  // namespace

void validate_newform_record(const NewformRecord& rec, int weight) {
  const QExpansion& f = rec.form;
  if (f.weight() != weight)
    throw SchemaError("record " + rec.label + ": weight " + std::to_string(f.weight()) +
                      " does not match bundle weight " + std::to_string(weight));
  if (f.precision() < 1) throw SchemaError("record " + rec.label + ": no coefficients");
  if (f.a(1) != RingElement::one(f.ring()))
    throw SchemaError("record " + rec.label + ": b(1) != 1");

  long long B = f.precision();
  auto spf = spf_table(B);
  long long N = f.level();
  const RingPtr& R = f.ring();

  for (long long n = 2; n <= B; ++n) {
    long long p = spf[n];
    long long pe = p;
    while (pe * p <= n && n % (pe * p) == 0) pe *= p;
    if (pe < n) {
      // n = p^e * m with gcd(p^e, m) = 1: coprime multiplicativity
      if (f.a(n) != f.a(pe) * f.a(n / pe))
        throw MultiplicativityViolation("record " + rec.label + ": b(" + std::to_string(n) +
                                        ") != b(" + std::to_string(pe) + ") b(" +
                                        std::to_string(n / pe) + ")");
    } else if (pe != p) {
      // prime power p^{r+1}, r >= 1: Hecke recursion
      long long pr = pe / p;
      RingElement expect = f.a(p) * f.a(pr);
      if (N % p != 0) {
        mpz_class pk1;
        mpz_ui_pow_ui(pk1.get_mpz_t(), (unsigned long)p, (unsigned long)(weight - 1));
        RingElement chi_p = f.character().value_in(R, p) * mpq_class(pk1);
        expect -= chi_p * f.a(pr / p);
      }
      if (f.a(pe) != expect)
        throw MultiplicativityViolation("record " + rec.label +
                                        ": Hecke recursion fails at prime power " +
                                        std::to_string(pe));
    }
  }
}

void validate_bundle(FormBundle& bundle) {
  if (!bundle.ring) throw SchemaError("bundle has no coefficient ring");
  for (long long i = 0; i < bundle.size(); ++i) {
    const NewformRecord& rec = bundle.forms[i];
    if (!rec.ring()->same_ring(*bundle.ring))
      throw SchemaError("record " + rec.label + ": ring differs from the bundle ring");
    if (rec.level() < 1 || bundle.level % rec.level() != 0)
      throw SchemaError("record " + rec.label + ": level " + std::to_string(rec.level()) +
                        " does not divide bundle level " + std::to_string(bundle.level));
    validate_newform_record(rec, bundle.weight);
  }

  mpz_class sturm = sturm_bound_1(bundle.weight, mpz_class((long)bundle.level) * (long)bundle.level);
  for (long long i = 0; i < bundle.size(); ++i) {
    for (long long j = i + 1; j < bundle.size(); ++j) {
      const NewformRecord& fi = bundle.forms[i];
      const NewformRecord& fj = bundle.forms[j];
      long long B = std::min(fi.precision(), fj.precision());
      long long sep = 0;
      for (long long p = 2; p <= B; ++p) {
        if (!is_prime_u64((u64)p) || bundle.level % p == 0) continue;
        if (fi.b(p) != fj.b(p)) {
          sep = p;
          break;
        }
      }
      if (sep == 0)
        throw DuplicateEigensystem("records " + fi.label + " and " + fj.label +
                                   " agree at every prime coprime to the level up to " +
                                   std::to_string(B));
      if (sturm < (long)sep)
        bundle.warnings.push_back("records " + fi.label + " and " + fj.label +
                                  " first separate at p = " + std::to_string(sep) +
                                  ", beyond the expected bound " + sturm.get_str());
    }
  }
}

FormBundle bundle_from_records(int weight, long long level, std::vector<NewformRecord> forms,
                               bool validate) {
  if (forms.empty()) throw SchemaError("bundle needs at least one record");
  FormBundle b;
  b.weight = weight;
  b.level = level;
  b.ring = forms[0].ring();
  b.forms = std::move(forms);
  if (validate) validate_bundle(b);
  return b;
}

std::string bundle_to_json(const FormBundle& bundle) {
  json j;
  j["weight"] = bundle.weight;
  j["level"] = bundle.level;
  j["ring_minpoly"] = minpoly_to_json(bundle.ring);
  json forms = json::array();
  for (const NewformRecord& rec : bundle.forms) {
    json r;
    r["label"] = rec.label;
    r["level"] = rec.level();
    r["char"] = character_to_json(rec.form.character());
    r["is_eisenstein"] = rec.is_eisenstein;
    json coeffs = json::array();
    for (long long n = 0; n <= rec.precision(); ++n) coeffs.push_back(coords_to_json(rec.b(n)));
    r["coeffs"] = coeffs;
    forms.push_back(std::move(r));
  }
  j["forms"] = std::move(forms);
  return j.dump(1);
}

void save_bundle(const FormBundle& bundle, const std::string& path) {
  save_text_file(path, bundle_to_json(bundle));
}

FormBundle load_bundle(const std::string& path, bool skip_validation) {
  json j = load_json_file(path);
  FormBundle b;
  try {
    b.weight = (int)json_to_mpz(j.at("weight")).get_si();
    b.level = (long long)json_to_mpz(j.at("level")).get_si();
    b.ring = ring_from_minpoly_json(j.at("ring_minpoly"));
    if (!j.contains("forms") || !j["forms"].is_array())
      throw SchemaError(path + ": missing forms array");
    for (const auto& r : j["forms"]) {
      NewformRecord rec;
      rec.label = r.value("label", "?");
      rec.is_eisenstein = r.value("is_eisenstein", false);
      long long level = r.contains("level") ? (long long)json_to_mpz(r["level"]).get_si() : b.level;
      DirichletCharacter chi =
          character_from_json(r.contains("char") ? r["char"] : json(), b.ring);
      std::vector<RingElement> coeffs;
      if (!r.contains("coeffs") || !r["coeffs"].is_array() || r["coeffs"].empty())
        throw SchemaError(path + ": record " + rec.label + " has no coeffs");
      for (const auto& c : r["coeffs"]) coeffs.push_back(coords_from_json(c, b.ring));
      rec.form = QExpansion(b.weight, level, chi, b.ring, std::move(coeffs));
      b.forms.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  } catch (const SchemaError&) {
    throw;
  } catch (const MathError& e) {
    // malformed data surfacing as arithmetic violations is a schema problem
    throw SchemaError(path + ": " + e.what());
  }
  if (!skip_validation) validate_bundle(b);
  return b;
}

}  // namespace modl
