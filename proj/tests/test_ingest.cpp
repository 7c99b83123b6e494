#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "modl/errors.hpp"
#include "modl/ingest.hpp"
#include "modl/jsonio.hpp"
#include "modl/level1.hpp"
#include "modl/siegel.hpp"

using namespace modl;

static const std::string kM8 = std::string(FIXTURE_SRC_DIR) + "/chi10_m8.json";

TEST_CASE("bundle round-trips through json byte-identically") {
  auto recs = eigenforms(12, 40);
  FormBundle b = bundle_from_records(12, 1, recs);
  std::string j1 = bundle_to_json(b);
  save_bundle(b, "tmp_bundle12.json");
  FormBundle b2 = load_bundle("tmp_bundle12.json");
  CHECK(bundle_to_json(b2) == j1);
  CHECK(b2.size() == 2);
  CHECK(b2.forms[0].label == "12.1.a");
  CHECK(b2.forms[1].is_eisenstein);
  CHECK(b2.forms[0].b(2) == RingElement::from_int(b2.ring, -24));
}

TEST_CASE("multiplicativity corruption is caught") {
  auto recs = eigenforms(12, 40);
  NewformRecord bad = recs[0];
  bad.form.set(6, bad.form.a(6) + RingElement::one(bad.ring()));
  CHECK_THROWS_AS(validate_newform_record(bad, 12), MultiplicativityViolation);

  // prime-power recursion: b(4) = b(2)^2 - 2^11
  NewformRecord bad2 = recs[0];
  bad2.form.set(4, bad2.form.a(4) - RingElement::one(bad2.ring()));
  CHECK_THROWS_AS(validate_newform_record(bad2, 12), MultiplicativityViolation);

  NewformRecord bad3 = recs[0];
  bad3.form.set(1, RingElement::from_int(bad3.ring(), 2));
  CHECK_THROWS_AS(validate_newform_record(bad3, 12), SchemaError);
}

TEST_CASE("duplicate eigensystems are rejected") {
  auto recs = eigenforms(12, 40);
  std::vector<NewformRecord> two = {recs[0], recs[0]};
  two[1].label = "12.1.z";
  CHECK_THROWS_AS(bundle_from_records(12, 1, std::move(two)), DuplicateEigensystem);
}

TEST_CASE("level divisibility and weight agreement") {
  auto recs = eigenforms(12, 40);
  NewformRecord off = recs[0];
  off.form = QExpansion(12, 3, off.form.character(), off.ring(), off.form.coeffs());
  CHECK_THROWS_AS(bundle_from_records(12, 2, {off}), SchemaError);

  NewformRecord wrongk = recs[0];
  CHECK_THROWS_AS(validate_newform_record(wrongk, 16), SchemaError);
}

TEST_CASE("late separation is a warning, not an error") {
  // weight 12: Delta and E12 first separate at p = 2, past the bound ceil(12/12) = 1
  FormBundle b12 = bundle_from_records(12, 1, eigenforms(12, 40));
  CHECK(b12.warnings.size() == 1);
  // weight 24: separation at p = 2 is within the bound 2
  FormBundle b24 = bundle_from_records(24, 1, eigenforms(24, 40));
  CHECK(b24.warnings.empty());
}

TEST_CASE("io failures surface as schema errors") {
  CHECK_THROWS_AS(load_bundle("no_such_file.json"), SchemaError);
  save_text_file("tmp_garbage.json", "{ not json");
  CHECK_THROWS_AS(load_bundle("tmp_garbage.json"), SchemaError);
}

TEST_CASE("siegel table round-trips and validates invariance") {
  SiegelExpansion f = load_siegel(kM8);
  CHECK(f.degree() == 2);
  CHECK(f.weight() == 10);
  CHECK(f.b_supp() == 8);
  CHECK(f.at(SiegelKey::from_abc(1, 1, 1)) == RingElement::one(f.ring()));

  save_siegel(f, "tmp_m8.json");
  SiegelExpansion g = load_siegel("tmp_m8.json");
  CHECK(f.table() == g.table());
  CHECK(siegel_to_json(f) == siegel_to_json(g));

  // corrupt one interior entry: its GL2-partner disagrees on reload
  nlohmann::json j = load_json_file(kM8);
  bool hit = false;
  for (auto& e : j["entries"]) {
    std::vector<long long> t2 = e["t2"].get<std::vector<long long>>();
    if (t2 == std::vector<long long>{2, 1, 4}) {
      e["a"] = {"12345"};
      hit = true;
    }
  }
  REQUIRE(hit);
  save_text_file("tmp_m8_bad.json", j.dump(1));
  CHECK_THROWS_AS(load_siegel("tmp_m8_bad.json"), InvarianceViolation);
  CHECK_NOTHROW(load_siegel("tmp_m8_bad.json", /*skip_validation=*/true));
}
