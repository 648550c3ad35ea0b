#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json_io.hpp"
#include "vnlab/harness.hpp"
#include "vnlab/random.hpp"

namespace vnlab::detail {

using io::json;

class Checks {
 public:
  void equal(const std::string& id, const std::string& clause, double lhs, double rhs, double tol);
  // lhs <= rhs
  void at_most(const std::string& id, const std::string& clause, double lhs, double rhs, double tol);
  // lhs >= rhs
  void at_least(const std::string& id, const std::string& clause, double lhs, double rhs, double tol);
  void flag(const std::string& id, const std::string& clause, bool ok);

  std::vector<CheckRecord> records;
};

struct SuiteDef {
  std::string name;
  int trials;
  bool fixed;  // a single deterministic instance, trials are ignored
  std::function<json(Rng&, int)> make;
  std::function<void(const json&, Checks&)> eval;
};

const std::vector<SuiteDef>& registry();

json make_state_pair(Rng& rng, int d);
json make_bipartite(Rng& rng, int da, int db);
json make_split_pair(Rng& rng, int da, int db);
json make_inclusion(Rng& rng, const std::vector<Block>& blocks);

void eval_pipeline(const json& inst, Checks& c);
void eval_canonical(const json& inst, Checks& c);

}  // namespace vnlab::detail
