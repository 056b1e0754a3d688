// JSON forms of the core objects, for experiment reproducibility. Haar
// shifts serialize as (seed, dims) rather than coefficient tables; the
// builder is deterministic under seed.
#pragma once

#include <json.hpp>

#include "dyadlab/decompose.hpp"
#include "dyadlab/operators.hpp"
#include "dyadlab/sparse.hpp"
#include "dyadlab/weights.hpp"

namespace dyad {

inline nlohmann::json to_json(const Box& b) {
  nlohmann::json j;
  j["lo"] = std::vector<int64_t>(b.lo.begin(), b.lo.begin() + b.dim);
  j["hi"] = std::vector<int64_t>(b.hi.begin(), b.hi.begin() + b.dim);
  return j;
}

inline nlohmann::json to_json(const Cube& q) {
  nlohmann::json j;
  j["level"] = q.level;
  j["corner"] =
      std::vector<int64_t>(q.corner.begin(), q.corner.begin() + q.dim());
  return j;
}

inline nlohmann::json to_json(const SparseFamily& S) {
  nlohmann::json j;
  j["grid"] = S.grid.shift_bits;
  j["n"] = S.grid.res.dim;
  j["L"] = S.grid.res.depth;
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& gen : S.generations) {
    nlohmann::json g = nlohmann::json::array();
    for (const Cube& q : gen) g.push_back(to_json(q));
    levels.push_back(g);
  }
  j["levels"] = levels;
  return j;
}

inline nlohmann::json to_json(const Decomposition& d) {
  nlohmann::json j;
  j["q0"] = to_json(d.q0);
  j["m0"] = d.m0;
  j["lambda"] = d.lambda;
  j["family"] = to_json(d.family);
  j["oscillations"] = d.oscillations;
  return j;
}

inline nlohmann::json to_json(const CharacteristicReport& rep) {
  nlohmann::json j;
  j["value"] = rep.value;
  j["attaining"] = to_json(rep.attaining);
  j["scope"] = scope_name(rep.scope);
  j["clipped"] = rep.clipped;
  return j;
}

inline nlohmann::json to_json(const HaarShift& S) {
  nlohmann::json j;
  j["seed"] = S.seed;
  j["m"] = S.m;
  j["k"] = S.k;
  j["generalized"] = S.generalized;
  j["grid"] = S.grid.shift_bits;
  j["n"] = S.grid.res.dim;
  j["L"] = S.grid.res.depth;
  return j;
}

}  // namespace dyad
