#include "modl/jsonio.hpp"

#include <fstream>
#include <sstream>

#include "modl/errors.hpp"
#include "modl/intutil.hpp"

namespace modl {

using nlohmann::json;

mpz_class json_to_mpz(const json& v) {
  if (v.is_string()) return parse_mpz(v.get<std::string>());
  if (v.is_number_integer()) return mpz_class((long)v.get<long long>());
  throw SchemaError("expected integer or integer string, got " + v.dump());
}

mpq_class json_to_mpq(const json& v) {
  if (v.is_number_integer()) return mpq_class((long)v.get<long long>());
  if (!v.is_string()) throw SchemaError("expected rational string, got " + v.dump());
  return parse_mpq(v.get<std::string>());
}

json character_to_json(const DirichletCharacter& chi) {
  json j;
  j["modulus"] = chi.modulus();
  switch (chi.kind()) {
    case DirichletCharacter::Kind::Trivial:
      j["kind"] = "trivial";
      break;
    case DirichletCharacter::Kind::Kronecker:
      j["kind"] = "kronecker";
      j["D"] = chi.discriminant().get_str();
      break;
    case DirichletCharacter::Kind::Table: {
      j["kind"] = "table";
      json vals = json::array();
      for (long long a = 0; a < chi.modulus(); ++a) vals.push_back(coords_to_json(chi.value(a)));
      j["values"] = vals;
      break;
    }
  }
  return j;
}

DirichletCharacter character_from_json(const json& j, const RingPtr& ring) {
  if (j.is_null()) return DirichletCharacter::trivial(1);
  std::string kind = j.value("kind", "trivial");
  long long modulus = j.contains("modulus") ? (long long)json_to_mpz(j["modulus"]).get_si() : 1;
  if (kind == "trivial") return DirichletCharacter::trivial(modulus);
  if (kind == "kronecker") return DirichletCharacter::kronecker(json_to_mpz(j.at("D")));
  if (kind == "table") {
    std::vector<RingElement> vals;
    for (const auto& coords : j.at("values")) vals.push_back(coords_from_json(coords, ring));
    return DirichletCharacter::table(modulus, ring, std::move(vals));
  }
  throw SchemaError("unknown character kind '" + kind + "'");
}

json coords_to_json(const RingElement& e) {
  json arr = json::array();
  for (const auto& q : e.coords()) arr.push_back(mpq_to_string(q));
  return arr;
}

RingElement coords_from_json(const json& arr, const RingPtr& ring) {
  if (!arr.is_array()) throw SchemaError("coordinates must be an array, got " + arr.dump());
  std::vector<mpq_class> c;
  for (const auto& v : arr) {
    // legacy pair form [num, den] still accepted alongside "num/den" strings
    if (v.is_array()) {
      if (v.size() != 2) throw SchemaError("coordinate pair must be [num, den]");
      mpq_class q(json_to_mpz(v.at(0)), json_to_mpz(v.at(1)));
      if (q.get_den() == 0) throw SchemaError("coordinate with zero denominator");
      q.canonicalize();
      c.push_back(q);
    } else {
      c.push_back(json_to_mpq(v));
    }
  }
  if ((long long)c.size() > (long long)ring->degree())
    throw SchemaError("coordinate vector longer than ring degree");
  c.resize(ring->degree(), mpq_class(0));
  return RingElement(ring, std::move(c));
}

json minpoly_to_json(const RingPtr& ring) {
  json mp = json::array();
  for (const auto& c : ring->min_poly()) mp.push_back(c.get_str());
  return mp;
}

RingPtr ring_from_minpoly_json(const json& arr) {
  if (!arr.is_array() || arr.empty())
    throw SchemaError("ring_minpoly must be a nonempty coefficient array");
  std::vector<mpz_class> mp;
  for (const auto& c : arr) mp.push_back(json_to_mpz(c));
  return NumberRing::make(mp);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception& e) {
    throw SchemaError(path + ": bad JSON: " + e.what());
  }
}

void save_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw SchemaError("write to " + path + " failed");
}

}  // namespace modl
