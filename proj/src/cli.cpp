#include "wthermo/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wthermo/equilibrium.hpp"
#include "wthermo/error.hpp"
#include "wthermo/marginal_projection.hpp"
#include "wthermo/model.hpp"
#include "wthermo/multifractal.hpp"
#include "wthermo/parallel.hpp"
#include "wthermo/pressure.hpp"

namespace wthermo {

using nlohmann::json;

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

struct CommonFlags {
  std::string model_path;
  int threads = 0;
  std::size_t n_max = 0;  // 0: take the model budget
};

PressureOptions pressure_options(const Model& model, const CommonFlags& flags, bool enumerate) {
  PressureOptions opts;
  opts.n_max = flags.n_max ? flags.n_max : model.budget.n_max;
  opts.word_budget = model.budget.word_budget;
  opts.force_enumeration = enumerate;
  return opts;
}

json enclosure_json(const PressureEnclosure& e) {
  return json{{"estimate", e.estimate}, {"lo", e.lo}, {"hi", e.hi}, {"n_used", e.n_used},
              {"method", to_string(e.method)}};
}

std::string spectrum_csv(const Spectrum& s) {
  std::string out = "q,alpha,f\n";
  for (const auto& row : s.samples)
    out += format_double(row.q) + "," + format_double(row.alpha) + "," + format_double(row.f) + "\n";
  return out;
}

json spectrum_json(const Spectrum& s) {
  json rows = json::array();
  for (const auto& row : s.samples) rows.push_back(json{{"q", row.q}, {"alpha", row.alpha}, {"f", row.f}});
  return json{{"kind", s.description},
              {"domain", json::array({s.alpha_min, s.alpha_max})},
              {"q_range", json::array({s.q_min, s.q_max})},
              {"samples", rows}};
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw ModelError("cannot write " + path);
  file << text;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Bernoulli measures are their own weighted equilibrium states for
// Psi = sum_i a_i log eta_i(tau_{i-1} x_1).
FiniteDepthPotential bernoulli_log_potential(const InvariantMeasureSpec& eta, const Model& model) {
  if (eta.kind() != InvariantMeasureSpec::Kind::bernoulli)
    throw ModelError("local-dimension spectra are available for Bernoulli measures only");
  const auto& chain = model.chain;
  std::vector<double> table(chain.alphabet_size(1), 0.0);
  for (int i = 1; i <= chain.levels(); ++i) {
    std::vector<double> pushed(chain.alphabet_size(i), 0.0);
    for (std::size_t s = 0; s < table.size(); ++s)
      pushed[chain.tau(i - 1, static_cast<Symbol>(s))] += eta.initial()[s];
    for (std::size_t s = 0; s < table.size(); ++s) {
      const double p = pushed[chain.tau(i - 1, static_cast<Symbol>(s))];
      if (p <= 0.0) throw ModelError("local-dimension spectra need fully supported measures");
      table[s] += model.a.a(i) * std::log(p);
    }
  }
  const std::size_t alphabet = table.size();
  return FiniteDepthPotential(1, alphabet, 1, std::move(table));
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted thermodynamic formalism on chains of full shifts"};
  app.require_subcommand(1);
  CommonFlags flags;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--model", flags.model_path, "JSON model file")->required();
    cmd->add_option("--threads", flags.threads, "worker threads (default: all cores)");
    cmd->add_option("--n-max", flags.n_max, "deepest word length for enumeration");
  };

  std::string potential, measure, out_path, constraint_path;
  bool enumerate = false, local_dimension = false;
  double q_max = -1.0, tol = -1.0;
  std::size_t q_steps = 0, depth = 4, n_cap = 3;

  auto* cmd_pressure = app.add_subcommand("pressure", "a-weighted topological pressure");
  add_common(cmd_pressure);
  cmd_pressure->add_option("--potential", potential)->required();
  cmd_pressure->add_flag("--enumerate", enumerate, "use cylinder enumeration even for depth-1 potentials");

  auto* cmd_dimension = app.add_subcommand("dimension", "Hausdorff dimension of (X, d_a)");
  add_common(cmd_dimension);
  cmd_dimension->add_flag("--enumerate", enumerate, "report the enumeration enclosure");

  auto* cmd_spectrum = app.add_subcommand("spectrum", "Birkhoff or local-dimension spectrum");
  add_common(cmd_spectrum);
  auto* opt_pot = cmd_spectrum->add_option("--potential", potential);
  auto* opt_meas = cmd_spectrum->add_option("--measure", measure, "Bernoulli measure (local dimensions)");
  opt_pot->excludes(opt_meas);
  cmd_spectrum->add_flag("--local-dimension", local_dimension,
                         "spectrum of local dimensions of the potential's equilibrium state");
  cmd_spectrum->add_option("--q-max", q_max);
  cmd_spectrum->add_option("--q-steps", q_steps, "grid steps on each side of q = 0");
  cmd_spectrum->add_option("--out", out_path, "output file (.csv or .json); stdout CSV when omitted");

  auto* cmd_project = app.add_subcommand("project-marginals", "max weighted entropy with given marginals");
  add_common(cmd_project);
  cmd_project->add_option("--constraint", constraint_path)->required();
  cmd_project->add_option("--tol", tol);
  cmd_project->add_option("--n-cap", n_cap, "largest accepted block length");

  auto* cmd_entropy = app.add_subcommand("entropy", "weighted entropy = dimension of the generic set");
  add_common(cmd_entropy);
  cmd_entropy->add_option("--measure", measure)->required();

  auto* cmd_export = app.add_subcommand("export-measure", "cylinder masses of an equilibrium state");
  add_common(cmd_export);
  cmd_export->add_option("--potential", potential)->required();
  cmd_export->add_option("--depth", depth);
  cmd_export->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitModel;
  }

  try {
    set_worker_count(flags.threads);
    const Model model = load_model(flags.model_path);

    if (cmd_pressure->parsed()) {
      const auto& phi = model.scalar_potential(potential);
      const auto e = pressure(phi, model.chain, model.a, pressure_options(model, flags, enumerate));
      out << enclosure_json(e).dump() << "\n";
    } else if (cmd_dimension->parsed()) {
      const auto opts = pressure_options(model, flags, enumerate);
      const auto e = pressure(FiniteDepthPotential::zero(model.chain.alphabet_size(1)), model.chain, model.a, opts);
      out << json{{"dim", e.estimate}, {"lo", e.lo}, {"hi", e.hi}, {"n_used", e.n_used},
                  {"method", to_string(e.method)}}
                 .dump()
          << "\n";
    } else if (cmd_spectrum->parsed()) {
      if (potential.empty() && measure.empty()) throw ModelError("spectrum needs --potential or --measure");
      const auto grid = symmetric_q_grid(q_max >= 0 ? q_max : model.budget.q_max,
                                         q_steps ? q_steps : model.budget.q_steps);
      PressureFunctionOptions popts;
      popts.pressure = pressure_options(model, flags, false);
      Spectrum spectrum;
      if (!measure.empty()) {
        const auto psi = bernoulli_log_potential(model.measure(measure), model);
        WeightedGibbsMeasure mu(psi, model.chain, model.a, popts.pressure);
        spectrum = local_dimension_spectrum(mu, grid, popts);
      } else if (local_dimension) {
        WeightedGibbsMeasure mu(model.scalar_potential(potential), model.chain, model.a, popts.pressure);
        spectrum = local_dimension_spectrum(mu, grid, popts);
      } else {
        spectrum = birkhoff_spectrum(model.scalar_potential(potential), model.chain, model.a, grid, popts);
      }
      const std::string text = ends_with(out_path, ".json") ? spectrum_json(spectrum).dump() + "\n"
                                                            : spectrum_csv(spectrum);
      write_output(out_path, text, out);
    } else if (cmd_project->parsed()) {
      const auto c = load_constraint(constraint_path);
      if (c.n > n_cap)
        throw BudgetError("block length " + std::to_string(c.n) + " exceeds --n-cap " + std::to_string(n_cap));
      ProjectionOptions popts;
      popts.pressure.pressure = pressure_options(model, flags, false);
      popts.tol = tol > 0 ? tol : (c.n == 1 ? model.budget.tolerance : std::max(model.budget.tolerance, 1e-6));
      validate_constraint(c, model.chain.alphabet_size(1));
      const auto r = project(c, model.chain, model.a, popts);
      out << json{{"q", r.q}, {"entropy", r.entropy}, {"marginal_error", r.marginal_error},
                  {"marginals", r.marginals}, {"iterations", r.iterations}}
                 .dump()
          << "\n";
    } else if (cmd_entropy->parsed()) {
      const auto h = generic_set_dimension(model.measure(measure), model.chain, model.a);
      out << json{{"value", h.value}, {"lo", h.lo}, {"hi", h.hi}}.dump() << "\n";
    } else if (cmd_export->parsed()) {
      WeightedGibbsMeasure mu(model.scalar_potential(potential), model.chain, model.a,
                              pressure_options(model, flags, false));
      std::string text = "word,log_mass,log_ratio_bound\n";
      for_each_word(1, model.chain.alphabet_size(1), depth, [&](const Word& w) {
        const auto m = mu.cylinder_mass(w);
        text += to_string(w) + "," + format_double(m.value) + "," + format_double(m.log_ratio_bound) + "\n";
      });
      write_output(out_path, text, out);
    }
  } catch (const ConstraintError& e) {
    err << "constraint error: " << e.what() << "\n";
    return kExitConstraint;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << "\n";
    return kExitModel;
  } catch (const BudgetError& e) {
    err << "budget error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("wthermo");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace wthermo
