// Experiment driver. Each subcommand runs one suite, writes rows.csv and
// summary.json under --out, prints the per-criterion lines and exits 0 iff
// every criterion passed.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "dyadlab/experiments.hpp"

namespace {

struct CommonFlags {
  std::string config_file;
  std::vector<std::string> params;
  std::string scope = "dyadic";
};

void add_common(CLI::App* cmd, dyad::ExperimentConfig& cfg, CommonFlags& fl) {
  cmd->add_option("--n", cfg.n, "dimension (1 or 2)");
  cmd->add_option("--L", cfg.L, "lattice depth; 2^L cells per axis");
  cmd->add_option("--seeds", cfg.seeds, "number of trials");
  cmd->add_option("--seed-base", cfg.base_seed, "first seed");
  cmd->add_option("--out", cfg.out_dir,
                  "output directory for rows.csv and summary.json");
  cmd->add_option("--config", fl.config_file, "file with key=value lines");
  cmd->add_option("--param", fl.params, "extra key=value suite parameter");
  cmd->add_option("--scope", fl.scope, "supremum scope: dyadic|lattice");
}

void apply_kv(dyad::ExperimentConfig& cfg, CLI::App* cmd, CommonFlags& fl,
              const std::string& key, const std::string& value) {
  auto flag_passed = [&](const std::string& name) {
    return cmd->count(name) > 0;
  };
  if (key == "n" && !flag_passed("--n"))
    cfg.n = std::stoi(value);
  else if (key == "L" && !flag_passed("--L"))
    cfg.L = std::stoi(value);
  else if (key == "seeds" && !flag_passed("--seeds"))
    cfg.seeds = std::stoi(value);
  else if (key == "seed_base" && !flag_passed("--seed-base"))
    cfg.base_seed = std::stoull(value);
  else if (key == "out" && !flag_passed("--out"))
    cfg.out_dir = value;
  else if (key == "scope" && !flag_passed("--scope"))
    fl.scope = value;
  else if (key != "n" && key != "L" && key != "seeds" && key != "seed_base" &&
           key != "out" && key != "scope")
    cfg.params[key] = value;
}

void finalize(dyad::ExperimentConfig& cfg, CLI::App* cmd, CommonFlags& fl) {
  if (!fl.config_file.empty()) {
    std::ifstream in(fl.config_file);
    if (!in.good())
      throw CLI::ValidationError("--config", "cannot read " + fl.config_file);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw CLI::ValidationError("--config", "expected key=value: " + line);
      apply_kv(cfg, cmd, fl, line.substr(0, eq), line.substr(eq + 1));
    }
  }
  for (const std::string& p : fl.params) {
    auto eq = p.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--param", "expected key=value: " + p);
    cfg.params[p.substr(0, eq)] = p.substr(eq + 1);  // CLI wins over config
  }
  if (fl.scope == "dyadic")
    cfg.scope = dyad::Scope::Dyadic;
  else if (fl.scope == "lattice")
    cfg.scope = dyad::Scope::Lattice;
  else
    throw CLI::ValidationError("--scope", "must be dyadic or lattice");
}

int report(const dyad::ExperimentConfig& cfg,
           const dyad::ExperimentResult& result) {
  dyad::write_outputs(cfg, result);
  for (const std::string& note : result.notes) std::cout << note << '\n';
  std::cout << "summary: " << result.summary.dump() << '\n';
  if (!cfg.out_dir.empty())
    std::cout << "wrote " << cfg.out_dir << "/rows.csv and summary.json\n";
  std::cout << (result.pass ? "RESULT: pass" : "RESULT: FAIL") << '\n';
  return result.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dyadlab: desk-scale experiments for sparse domination of "
               "singular integrals"};
  app.require_subcommand(1);

  struct SuiteSpec {
    const char* name;
    const char* help;
    dyad::ExperimentResult (*run)(const dyad::ExperimentConfig&);
    int L;
    int seeds;
  };
  const SuiteSpec suites[] = {
      {"decompose", "local mean oscillation decomposition, exact cellwise",
       dyad::run_decomposition_suite, 10, 200},
      {"a2-sweep", "||A||_{L^2(w)} against ||w||_{A_2} over power weights",
       dyad::run_a2_sweep, 10, 1},
      {"dominate", "T# against the best shifted-grid sparse majorant",
       dyad::run_domination_suite, 8, 10},
      {"weak11", "weak (1,1) linearity in i for A_i*", dyad::run_weak11_suite,
       10, 15},
      {"bilinear", "bilinear maximal function sparse domination, exact",
       dyad::run_bilinear_suite, 8, 200},
      {"two-weight", "two-weight equivalence and Orlicz bump experiments",
       dyad::run_two_weight_suite, 7, 10},
      {"haar-osc", "oscillation of maximal truncated Haar shifts",
       dyad::run_haar_osc_suite, 8, 25},
      {"mixed", "||A||_{L^p(w)} against the mixed A_p-A_r characteristic",
       dyad::run_mixed_ap_ar_suite, 7, 1},
      {"characteristics", "weight characteristic report",
       dyad::run_characteristics, 8, 1},
  };

  std::vector<std::pair<dyad::ExperimentConfig, CommonFlags>> configs(
      std::size(suites));
  std::vector<CLI::App*> cmds;
  for (size_t i = 0; i < std::size(suites); ++i) {
    auto& [cfg, fl] = configs[i];
    cfg.name = suites[i].name;
    cfg.L = suites[i].L;
    cfg.seeds = suites[i].seeds;
    CLI::App* cmd = app.add_subcommand(suites[i].name, suites[i].help);
    add_common(cmd, cfg, fl);
    cmds.push_back(cmd);
  }

  CLI11_PARSE(app, argc, argv);

  for (size_t i = 0; i < std::size(suites); ++i) {
    if (!cmds[i]->parsed()) continue;
    auto& [cfg, fl] = configs[i];
    try {
      finalize(cfg, cmds[i], fl);
      return report(cfg, suites[i].run(cfg));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
  }
  return 2;
}
