#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "wthermo/equilibrium.hpp"
#include "wthermo/marginal_projection.hpp"
#include "wthermo/potential.hpp"
#include "wthermo/shift_space.hpp"

namespace wthermo {

struct ComputeBudget {
  std::size_t n_max = 12;
  double q_max = 40.0;
  std::size_t q_steps = 40;
  double tolerance = 1e-9;
  std::size_t word_budget = 10'000'000;
};

// Contents of a JSON model file:
//   {"alphabets": [3, 2], "factor_maps": [[0, 0, 1]],
//    "a": [..] or {"carpet_bases": [3, 2]},
//    "potentials": {"name": {"level": 1, "depth": m, "log_table": [..]} | {"zero": true} | [spec, ..]},
//    "measures": {"name": {"kind": "bernoulli", "p": [..]} |
//                         {"kind": "markov", "initial": [..], "transition": [[..], ..]}},
//    "budget": {"n_max": 12, "q_max": 40, "q_steps": 40, "tolerance": 1e-9, "word_budget": 1e7}}
struct Model {
  FactorChain chain;
  WeightVector a;
  std::map<std::string, std::vector<FiniteDepthPotential>> potentials;
  std::map<std::string, InvariantMeasureSpec> measures;
  ComputeBudget budget;

  const FiniteDepthPotential& scalar_potential(const std::string& name) const;
  const std::vector<FiniteDepthPotential>& vector_potential(const std::string& name) const;
  const InvariantMeasureSpec& measure(const std::string& name) const;
};

FiniteDepthPotential parse_potential(const nlohmann::json& spec, const FactorChain& chain);
InvariantMeasureSpec parse_measure(const nlohmann::json& spec);
Model parse_model(const nlohmann::json& doc);
Model load_model(const std::string& path);

MarginalConstraint parse_constraint(const nlohmann::json& doc);
MarginalConstraint load_constraint(const std::string& path);

}  // namespace wthermo
