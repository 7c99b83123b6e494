#pragma once
// load/validate/persist externally computed newform data
#include <string>
#include <vector>

#include "modl/level1.hpp"

namespace modl {

// all newforms (cuspidal + Eisenstein analogues) of weight k and level dividing N,
// over one shared coefficient ring
struct FormBundle {
  int weight = 0;
  long long level = 1;
  RingPtr ring;
  std::vector<NewformRecord> forms;
  std::vector<std::string> warnings;  // non-fatal validation findings

  long long size() const { return (long long)forms.size(); }
};

// per-record checks: b(1) = 1, Hecke multiplicativity on coprime indices, and the
// p-power recursion b(p^{r+1}) = b(p)b(p^r) - chi(p) p^{k-1} b(p^{r-1}) away from
// the level (without the chi term at primes dividing the level)
void validate_newform_record(const NewformRecord& rec, int weight);

// cross-record checks: ring/weight agreement, levels divide the bundle level,
// pairwise separation (DuplicateEigensystem when two records agree at every
// prime coprime to the level within stored precision); appends a warning when
// the smallest separating prime exceeds the level-square Sturm bound
void validate_bundle(FormBundle& bundle);

FormBundle bundle_from_records(int weight, long long level, std::vector<NewformRecord> forms,
                               bool validate = true);

FormBundle load_bundle(const std::string& path, bool skip_validation = false);
std::string bundle_to_json(const FormBundle& bundle);
void save_bundle(const FormBundle& bundle, const std::string& path);

}  // namespace modl
