#pragma once
// shared JSON helpers for the interchange formats: big integers travel as
// decimal strings, ring-element coordinates as "num" or "num/den" strings
#include <gmpxx.h>

#include <string>

#include "json.hpp"
#include "modl/numring.hpp"
#include "modl/qexp.hpp"

namespace modl {

mpz_class json_to_mpz(const nlohmann::json& v);
mpq_class json_to_mpq(const nlohmann::json& v);  // "a", "a/b", or integer

nlohmann::json character_to_json(const DirichletCharacter& chi);
DirichletCharacter character_from_json(const nlohmann::json& j, const RingPtr& ring);

// ["c0", "c1", ...] with one decimal (or "num/den") string per power-basis coordinate
nlohmann::json coords_to_json(const RingElement& e);
RingElement coords_from_json(const nlohmann::json& arr, const RingPtr& ring);

// minimal polynomial as a coefficient list, constant term first
nlohmann::json minpoly_to_json(const RingPtr& ring);
RingPtr ring_from_minpoly_json(const nlohmann::json& arr);

// file plumbing; wraps parse errors into SchemaError
nlohmann::json load_json_file(const std::string& path);
void save_text_file(const std::string& path, const std::string& text);

}  // namespace modl
