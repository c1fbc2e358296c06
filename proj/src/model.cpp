#include "wthermo/model.hpp"

#include <fstream>

#include "wthermo/error.hpp"

namespace wthermo {

using nlohmann::json;

namespace {

template <typename T>
T get_as(const json& node, const char* what) {
  try {
    return node.get<T>();
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed ") + what + ": " + e.what());
  }
}

FactorChain parse_chain(const json& doc) {
  if (!doc.contains("alphabets")) throw ModelError("model needs \"alphabets\"");
  auto sizes = get_as<std::vector<std::size_t>>(doc.at("alphabets"), "alphabets");
  std::vector<std::vector<Symbol>> maps;
  if (doc.contains("factor_maps")) {
    for (const auto& m : doc.at("factor_maps")) {
      std::vector<Symbol> map;
      for (const auto& v : m) {
        const auto s = get_as<long long>(v, "factor map entry");
        if (s < 0 || s > 65535) throw ModelError("factor map entry out of range");
        map.push_back(static_cast<Symbol>(s));
      }
      maps.push_back(std::move(map));
    }
  }
  return FactorChain(std::move(sizes), std::move(maps));
}

WeightVector parse_weights(const json& doc) {
  if (!doc.contains("a")) throw ModelError("model needs the weight vector \"a\"");
  const auto& node = doc.at("a");
  if (node.is_object()) {
    if (!node.contains("carpet_bases")) throw ModelError("\"a\" object must hold \"carpet_bases\"");
    const auto bases = get_as<std::vector<double>>(node.at("carpet_bases"), "carpet_bases");
    return WeightVector::carpet(bases);
  }
  return WeightVector(get_as<std::vector<double>>(node, "a"));
}

template <typename Map>
const typename Map::mapped_type& lookup(const Map& map, const std::string& name, const char* what) {
  auto it = map.find(name);
  if (it == map.end()) throw ModelError(std::string("unknown ") + what + " \"" + name + "\"");
  return it->second;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ModelError("invalid JSON in " + path + ": " + e.what());
  }
}

}  // namespace

FiniteDepthPotential parse_potential(const json& spec, const FactorChain& chain) {
  if (!spec.is_object()) throw ModelError("potential spec must be an object");
  const std::size_t alphabet = chain.alphabet_size(1);
  if (spec.value("zero", false)) return FiniteDepthPotential::zero(alphabet);
  const int level = spec.contains("level") ? get_as<int>(spec.at("level"), "level") : 1;
  if (level != 1) throw ModelError("potentials are supplied at level 1");
  if (!spec.contains("depth") || !spec.contains("log_table"))
    throw ModelError("potential spec needs \"depth\" and \"log_table\" (or \"zero\": true)");
  const int depth = get_as<int>(spec.at("depth"), "depth");
  if (depth < 1) throw ModelError("potential depth must be >= 1");
  return FiniteDepthPotential(1, alphabet, depth, get_as<std::vector<double>>(spec.at("log_table"), "log_table"));
}

InvariantMeasureSpec parse_measure(const json& spec) {
  if (!spec.is_object() || !spec.contains("kind")) throw ModelError("measure spec needs \"kind\"");
  const auto kind = get_as<std::string>(spec.at("kind"), "kind");
  if (kind == "bernoulli") {
    if (!spec.contains("p")) throw ModelError("bernoulli measure needs \"p\"");
    return InvariantMeasureSpec::bernoulli(get_as<std::vector<double>>(spec.at("p"), "p"));
  }
  if (kind == "markov") {
    if (!spec.contains("initial") || !spec.contains("transition"))
      throw ModelError("markov measure needs \"initial\" and \"transition\"");
    return InvariantMeasureSpec::markov(get_as<std::vector<double>>(spec.at("initial"), "initial"),
                                        get_as<std::vector<std::vector<double>>>(spec.at("transition"),
                                                                                 "transition"));
  }
  throw ModelError("unknown measure kind \"" + kind + "\"");
}

Model parse_model(const json& doc) {
  if (!doc.is_object()) throw ModelError("model file must hold a JSON object");
  Model model{parse_chain(doc), parse_weights(doc), {}, {}, {}};
  if (model.a.size() != model.chain.levels())
    throw ModelError("\"a\" must have one entry per alphabet");

  if (doc.contains("potentials")) {
    for (const auto& [name, spec] : doc.at("potentials").items()) {
      std::vector<FiniteDepthPotential> parts;
      if (spec.is_array()) {
        for (const auto& s : spec) parts.push_back(parse_potential(s, model.chain));
        if (parts.empty()) throw ModelError("vector potential \"" + name + "\" is empty");
      } else {
        parts.push_back(parse_potential(spec, model.chain));
      }
      model.potentials.emplace(name, std::move(parts));
    }
  }
  if (!model.potentials.count("zero"))
    model.potentials.emplace("zero", std::vector{FiniteDepthPotential::zero(model.chain.alphabet_size(1))});

  if (doc.contains("measures")) {
    for (const auto& [name, spec] : doc.at("measures").items()) {
      auto m = parse_measure(spec);
      if (m.alphabet_size() != model.chain.alphabet_size(1))
        throw ModelError("measure \"" + name + "\" does not live on the level-1 alphabet");
      model.measures.emplace(name, std::move(m));
    }
  }

  if (doc.contains("budget")) {
    const auto& b = doc.at("budget");
    auto& out = model.budget;
    out.n_max = b.contains("n_max") ? get_as<std::size_t>(b.at("n_max"), "n_max") : out.n_max;
    out.q_max = b.contains("q_max") ? get_as<double>(b.at("q_max"), "q_max") : out.q_max;
    out.q_steps = b.contains("q_steps") ? get_as<std::size_t>(b.at("q_steps"), "q_steps") : out.q_steps;
    out.tolerance = b.contains("tolerance") ? get_as<double>(b.at("tolerance"), "tolerance") : out.tolerance;
    out.word_budget = b.contains("word_budget")
                          ? static_cast<std::size_t>(get_as<double>(b.at("word_budget"), "word_budget"))
                          : out.word_budget;
  }
  return model;
}

Model load_model(const std::string& path) { return parse_model(read_json(path)); }

const FiniteDepthPotential& Model::scalar_potential(const std::string& name) const {
  const auto& parts = lookup(potentials, name, "potential");
  if (parts.size() != 1) throw ModelError("potential \"" + name + "\" is a vector potential");
  return parts.front();
}

const std::vector<FiniteDepthPotential>& Model::vector_potential(const std::string& name) const {
  return lookup(potentials, name, "potential");
}

const InvariantMeasureSpec& Model::measure(const std::string& name) const {
  return lookup(measures, name, "measure");
}

MarginalConstraint parse_constraint(const json& doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("p"))
    throw ModelError("constraint file needs \"n\" and \"p\"");
  return MarginalConstraint{get_as<std::size_t>(doc.at("n"), "n"), get_as<std::vector<double>>(doc.at("p"), "p")};
}

MarginalConstraint load_constraint(const std::string& path) { return parse_constraint(read_json(path)); }

}  // namespace wthermo
