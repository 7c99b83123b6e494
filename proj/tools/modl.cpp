// modl: batch front-end. Subcommands: sieve (emit a verified congruence
// relation), count (nonvanishing counters as CSV), report (merge CSV/JSON
// artifacts into one markdown file). Exit codes: 0 ok, 1 input/schema error,
// 2 mathematical precondition failure.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "modl/count.hpp"
#include "modl/errors.hpp"
#include "modl/ingest.hpp"
#include "modl/level1.hpp"
#include "modl/qexp.hpp"
#include "modl/siegel.hpp"
#include "modl/sieve.hpp"

using namespace modl;
using nlohmann::json;

namespace {

// ------------------------------------------------------------- form aliases

int alias_weight(const std::string& a) {
  if (a == "delta") return 12;
  if (a == "delta2") return 24;
  if (a == "e4") return 4;
  if (a == "e6") return 6;
  if (a == "x1:24" || a == "x2:24") return 24;
  if (a.rfind("ek:", 0) == 0) {
    int k = 0;
    try {
      k = std::stoi(a.substr(3));
    } catch (...) {
      throw SchemaError("bad weight in alias '" + a + "'");
    }
    if (k < 4 || k % 2 != 0) throw SchemaError("ek:K needs even K >= 4");
    return k;
  }
  throw SchemaError("unknown form alias '" + a +
                    "' (known: delta, delta2, e4, e6, ek:K, x1:24, x2:24)");
}

RingPtr alias_ring(const std::string& a) {
  if (a == "x1:24" || a == "x2:24") return eigenforms(24, 4)[0].ring();
  return NumberRing::rationals();
}

QExpansion alias_form(const std::string& a, long long B) {
  if (a == "delta") return delta(B);
  if (a == "delta2") {
    QExpansion d = delta(B);
    return d * d;
  }
  if (a == "x1:24") return eigenforms(24, B)[0].form;
  if (a == "x2:24") return eigenforms(24, B)[1].form;
  return eisenstein_Ek(alias_weight(a), B);
}

ResidueSeries alias_reduced(const std::string& a, long long B, const ResidueMapPtr& r) {
  if (a == "delta") return delta_reduced(B, r);
  if (a == "delta2") {
    ResidueSeries d = delta_reduced(B, r);
    return d * d;
  }
  if (a == "x1:24") return newform_reduced(eigenforms(24, 8)[0], B, r);
  if (a == "x2:24") return newform_reduced(eigenforms(24, 8)[1], B, r);
  return eisenstein_Ek_reduced(alias_weight(a), B, r);
}

std::vector<ResidueMapPtr> select_maps(const RingPtr& ring, long long ell,
                                       const std::string& sel) {
  if (ell < 2) throw SchemaError("--ell must be a prime");
  auto maps = primes_above(ring, (u64)ell);
  if (sel == "all") return maps;
  long long idx = -1;
  try {
    idx = std::stoll(sel);
  } catch (...) {
    throw SchemaError("--prime-index must be an integer or 'all'");
  }
  if (idx < 0 || idx >= (long long)maps.size())
    throw SchemaError("prime index out of range: only " + std::to_string(maps.size()) +
                      " prime(s) above " + std::to_string(ell));
  return {maps[(size_t)idx]};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot open output file " + path);
  out << text;
}

// ------------------------------------------------------------------- sieve

struct SieveOpts {
  std::string form;
  int weight = 0;
  long long level = 1;
  long long ell = 0;
  std::string prime_index = "all";
  long long verify_to = 120;
  std::string mode = "shared";
  std::string out;
};

int cmd_sieve(const SieveOpts& o) {
  int k = alias_weight(o.form);
  if (o.weight != 0 && o.weight != k)
    throw SchemaError("--weight disagrees with the alias weight " + std::to_string(k));
  if (o.level != 1) throw SchemaError("built-in aliases are level 1");
  if (o.verify_to < 1) throw SchemaError("--verify-to must be positive");
  AdmissibleMode mode;
  if (o.mode == "shared")
    mode = AdmissibleMode::Shared;
  else if (o.mode == "distinct")
    mode = AdmissibleMode::Distinct;
  else
    throw SchemaError("--mode must be shared or distinct");

  const long long B0 = 120;  // enough rows for any level-1 weight handled here
  FormBundle bundle = bundle_from_records(k, 1, eigenforms(k, B0));
  QExpansion f = alias_form(o.form, B0);
  Decomposition dec = decompose(f, bundle);
  std::vector<int> supp = support_set(dec);
  AdmissibleSet aset = admissible_set(bundle, supp, /*M=*/1, mode);

  // the relation samples a(f, gamma * Delta * n); at level 1 the dilation is 1
  // and every gamma divides the product of the distinct admissible primes
  long long span = 1;
  {
    std::set<long long> qs;
    for (const auto& [pair, q] : aset.q) qs.insert(q);
    for (long long q : qs) span *= q;
  }

  json doc;
  doc["relations"] = json::array();
  for (const auto& r : select_maps(bundle.ring, o.ell, o.prime_index)) {
    ResidueSeries fhi = alias_reduced(o.form, span * o.verify_to, r);
    SieveRelation rel =
        extract_newform_relation(f, bundle, dec, aset, r, /*Q=*/1, o.verify_to, &fhi);
    json j = json::parse(rel.to_json());
    std::printf("map %s: a(%s, n) expressed through %zu dilated terms of %s\n",
                rel.map_label.c_str(), rel.target_label.c_str(), rel.terms.size(),
                o.form.c_str());
    for (const auto& t : j["terms"])
      std::printf("  beta = %s, gamma = %s\n", t["beta"].dump().c_str(),
                  t["gamma"].get<std::string>().c_str());
    std::printf("  verified for all n <= %lld\n", rel.verified_upto);
    doc["relations"].push_back(std::move(j));
  }
  std::string text = doc.dump(1) + "\n";
  if (o.out.empty())
    std::fputs(text.c_str(), stdout);
  else
    write_text(o.out, text);
  return 0;
}

// ------------------------------------------------------------------- count

struct CountOpts {
  std::string form;
  std::string siegel;
  long long ell = 0;
  std::string prime_index = "all";
  long long x = 0;
  std::string grid;
  std::string filter = "none";
  std::string by = "det";
  bool skip_validation = false;
  bool fit = false;
  std::string out;
};

int cmd_count(const CountOpts& o) {
  if (o.form.empty() == o.siegel.empty())
    throw SchemaError("exactly one of --form / --siegel is required");
  if (o.x < 1) throw SchemaError("--x must be positive");
  FilterSpec fs = FilterSpec::parse(o.filter);

  std::vector<CountSeries> all;
  if (!o.siegel.empty()) {
    SiegelExpansion f = load_siegel(o.siegel, o.skip_validation);
    if (!o.grid.empty()) throw SchemaError("--grid applies to elliptic counts only");
    for (const auto& r : select_maps(f.ring(), o.ell, o.prime_index)) {
      if (o.by == "det")
        all.push_back(count_det(f, r, o.x, fs));
      else if (o.by == "trace") {
        if (fs.kind != FilterSpec::Kind::None)
          throw SchemaError("trace counting does not take a filter");
        all.push_back(count_trace(f, r, o.x));
      } else
        throw SchemaError("--by must be det or trace");
    }
  } else {
    std::vector<long long> grid;
    if (o.grid.empty()) {
      grid = default_grid(o.x);
    } else {
      std::stringstream ss(o.grid);
      std::string tok;
      while (std::getline(ss, tok, ',')) grid.push_back(std::stoll(tok));
      for (size_t i = 0; i + 1 < grid.size(); ++i)
        if (grid[i] >= grid[i + 1]) throw SchemaError("--grid must be strictly increasing");
    }
    for (const auto& r : select_maps(alias_ring(o.form), o.ell, o.prime_index)) {
      ResidueSeries series = alias_reduced(o.form, o.x, r);
      all.push_back(pi_count(series, grid, fs, o.form));
    }
  }

  std::ostringstream text;
  for (size_t i = 0; i < all.size(); ++i) {
    std::string csv = all[i].to_csv();
    if (i > 0) csv = csv.substr(csv.find('\n') + 1);  // keep a single header
    text << csv;
  }
  if (o.fit) {
    for (const auto& s : all) {
      char buf[160];
      try {
        FitResult fr = fit_alpha(s);
        std::snprintf(buf, sizeof(buf),
                      "# fit %s ell=%s: alpha=%.4f c=%.4f max_rel_residual=%.4f%s (heuristic)\n",
                      s.label.c_str(), s.ell.c_str(), fr.alpha, fr.c, fr.max_rel_residual,
                      fr.model_mismatch ? " MODEL-MISMATCH" : "");
      } catch (const InsufficientData&) {
        std::snprintf(buf, sizeof(buf), "# fit %s ell=%s: insufficient checkpoints\n",
                      s.label.c_str(), s.ell.c_str());
      }
      text << buf;
    }
  }
  write_text(o.out, text.str());
  return 0;
}

// ------------------------------------------------------------------ report

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"')
        quoted = false;
      else
        cur += c;
    } else if (c == '"')
      quoted = true;
    else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else
      cur += c;
  }
  out.push_back(cur);
  return out;
}

void parse_count_csv(const std::string& path, std::vector<CountSeries>& acc) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read " + path);
  std::string line;
  auto key_of = [](const CountSeries& s) { return s.filter + "\x1f" + s.label + "\x1f" + s.ell; };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || line.rfind("x,", 0) == 0) continue;
    auto f = split_csv_row(line);
    if (f.size() != 5) throw SchemaError("bad CSV row in " + path + ": " + line);
    CountSeries probe;
    probe.filter = f[2];
    probe.label = f[3];
    probe.ell = f[4];
    CountSeries* dst = nullptr;
    for (auto& s : acc)
      if (key_of(s) == key_of(probe)) dst = &s;
    if (!dst) {
      acc.push_back(probe);
      dst = &acc.back();
    }
    dst->xs.push_back(std::stoll(f[0]));
    dst->counts.push_back(std::stoll(f[1]));
  }
}

void parse_relation_json(const std::string& path, std::vector<json>& acc) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError("malformed JSON in " + path + ": " + e.what());
  }
  if (j.is_object() && j.contains("relations"))
    for (const auto& r : j["relations"]) acc.push_back(r);
  else if (j.is_array())
    for (const auto& r : j) acc.push_back(r);
  else
    acc.push_back(j);
}

struct ReportOpts {
  std::vector<std::string> inputs;
  std::string out;
};

int cmd_report(const ReportOpts& o) {
  std::vector<CountSeries> series;
  std::vector<json> relations;
  for (const auto& p : o.inputs) {
    if (p.size() > 5 && p.substr(p.size() - 5) == ".json")
      parse_relation_json(p, relations);
    else
      parse_count_csv(p, series);
  }

  std::ostringstream md;
  md << "# nonvanishing report\n";
  if (series.empty() && relations.empty()) {
    md << "\n_no inputs_\n";
    write_text(o.out, md.str());
    return 0;
  }

  if (!relations.empty()) {
    md << "\n## congruence relations\n\n";
    for (const auto& r : relations) {
      md << "- target `" << r.value("target_label", "?") << "` via map `"
         << r.value("map", "?") << "`: dilation " << r.value("delta", 0LL) << ", "
         << (r.contains("terms") ? r["terms"].size() : (size_t)0)
         << " terms, verified to n <= " << r.value("verified_upto", 0LL) << "\n";
    }
  }

  for (const auto& s : series) {
    md << "\n## counts: " << s.label << " (ell " << s.ell << ", filter " << s.filter << ")\n\n";
    md << "| x | count |\n|---:|---:|\n";
    for (size_t i = 0; i < s.xs.size(); ++i)
      md << "| " << s.xs[i] << " | " << s.counts[i] << " |\n";
    bool positive = !s.counts.empty() && s.counts.back() > 0;
    if (s.xs.size() >= 5 && positive) {
      try {
        FitResult fr = fit_alpha(s);
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "\nexpected shape: ~ c x / (log x)^alpha; heuristic fit alpha = %.3f, "
                      "c = %.3f%s\n",
                      fr.alpha, fr.c, fr.model_mismatch ? " (model mismatch flagged)" : "");
        md << buf;
      } catch (const InsufficientData&) {
      }
    }
  }

  // sandwich tables: a reference series (label x1*) against a squared form,
  // grouped by residue map, on doubling checkpoints
  std::set<std::string> ells;
  for (const auto& s : series) ells.insert(s.ell);
  for (const auto& ell : ells) {
    const CountSeries *ref = nullptr, *sq = nullptr;
    for (const auto& s : series) {
      if (s.ell != ell) continue;
      if (s.label.rfind("x1", 0) == 0) ref = &s;
      if (s.label.rfind("delta2", 0) == 0 || s.label.rfind("delta-squared", 0) == 0) sq = &s;
    }
    if (!ref || !sq) continue;
    auto count_at = [](const CountSeries& s, long long x) -> long long {
      for (size_t i = 0; i < s.xs.size(); ++i)
        if (s.xs[i] == x) return s.counts[i];
      return -1;
    };
    md << "\n## sandwich check (ell " << ell << ")\n\n";
    md << "| x | pi(ref, x/2) | pi(sq, x) | pi(ref, x) | ok |\n|---:|---:|---:|---:|:---:|\n";
    for (long long x : sq->xs) {
      long long lo = count_at(*ref, x / 2), mid = count_at(*sq, x), hi = count_at(*ref, x);
      if (lo < 0 || hi < 0) continue;
      bool okk = lo <= mid && mid <= hi;
      md << "| " << x << " | " << lo << " | " << mid << " | " << hi << " | "
         << (okk ? "yes" : "VIOLATED") << " |\n";
    }
  }
  write_text(o.out, md.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mod-l nonvanishing toolkit"};
  app.require_subcommand(1);
  long long seed = 0;  // reserved: all built-in pipelines are deterministic
  app.add_option("--seed", seed, "seed for randomized auxiliaries (reserved)");

  SieveOpts so;
  CLI::App* sieve = app.add_subcommand("sieve", "emit a verified mod-l congruence relation");
  sieve->add_option("--form", so.form, "form alias (delta, delta2, e4, e6, ek:K, x1:24, x2:24)")
      ->required();
  sieve->add_option("--weight", so.weight, "expected weight (cross-checked)");
  sieve->add_option("--level", so.level, "level (aliases are level 1)");
  sieve->add_option("--ell", so.ell, "rational prime l")->required();
  sieve->add_option("--prime-index", so.prime_index, "prime above l: index or 'all'");
  sieve->add_option("--verify-to", so.verify_to, "verify the relation for n up to this bound");
  sieve->add_option("--mode", so.mode, "admissible-set mode: shared | distinct");
  sieve->add_option("--out", so.out, "write relation JSON here instead of stdout");

  CountOpts co;
  CLI::App* count = app.add_subcommand("count", "nonvanishing counters as CSV");
  count->add_option("--form", co.form, "form alias for elliptic counting");
  count->add_option("--siegel", co.siegel, "degree-2 Fourier table (JSON) for det/trace counting");
  count->add_option("--ell", co.ell, "rational prime l")->required();
  count->add_option("--prime-index", co.prime_index, "prime above l: index or 'all'");
  count->add_option("--x", co.x, "count up to x")->required();
  count->add_option("--grid", co.grid, "comma-separated checkpoints (elliptic only)");
  count->add_option("--filter", co.filter, "none | sf | prime | coprime:Q");
  count->add_option("--by", co.by, "siegel counter: det | trace");
  count->add_flag("--skip-validation", co.skip_validation, "skip invariance validation on load");
  count->add_flag("--fit", co.fit, "append heuristic density-fit comment lines");
  count->add_option("--out", co.out, "write CSV here instead of stdout");

  ReportOpts ro;
  CLI::App* report = app.add_subcommand("report", "merge CSV/JSON artifacts into markdown");
  report->add_option("inputs", ro.inputs, "CSV or JSON artifacts");
  report->add_option("--out", ro.out, "write markdown here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints help/usage; fold usage errors into exit 1
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sieve) return cmd_sieve(so);
    if (*count) return cmd_count(co);
    if (*report) return cmd_report(ro);
  } catch (const SupportInsufficientFor& e) {
    std::fprintf(stderr, "precondition failed: %s (max usable x = %lld)\n", e.what(),
                 e.max_usable);
    return 2;
  } catch (const SchemaError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const InternalCheckError& e) {
    std::fprintf(stderr, "internal check failed, please report: %s\n", e.what());
    return 1;
  } catch (const MathError& e) {
    std::fprintf(stderr, "precondition failed: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
