#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flpbd/experiment.hpp"
#include "flpbd/genbench.hpp"
#include "flpbd/milp.hpp"
#include "flpbd/random.hpp"
#include "flpbd/recourse.hpp"
#include "flpbd/scenario.hpp"
#include "flpbd/solve.hpp"
#include "flpbd/xeval.hpp"

namespace fs = std::filesystem;
using namespace flpbd;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const nlohmann::json& doc, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::ofstream f(out);
    if (!f) throw InputError("cannot write " + out);
    f << doc.dump(2) << '\n';
  }
}

nlohmann::json result_json(const SolveResult& r) {
  nlohmann::json doc;
  doc["policy"] = std::string(policy_key(r.policy));
  doc["status"] = std::string(status_name(r.status));
  auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  doc["z_upper"] = finite_or_null(r.z_upper);
  doc["z_lower"] = finite_or_null(r.z_lower);
  doc["gap_pct"] = finite_or_null(r.gap());
  doc["nodes"] = r.stats.nodes;
  if (r.best_solution) doc["solution"] = solution_to_json(*r.best_solution);
  return doc;
}

struct Common {
  std::uint64_t seed = 1;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--out", c.out, "Output path ('-' or empty: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Facility location with Bernoulli demand under four outsourcing policies"};
  app.require_subcommand(1);

  // gen-instance
  Common gen_c;
  std::string gen_coords;
  std::size_t gen_points = 60, gen_sites = 4, gen_customers = 8;
  std::string gen_pattern = "PT1", gen_setup = "tenth", gen_ell = "positive";
  int gen_gamma = 1, gen_target = 5;
  auto* gen = app.add_subcommand("gen-instance", "Generate a benchmark instance");
  add_common(gen, gen_c);
  gen->add_option("--coords", gen_coords, "TSPLIB EUC_2D file (synthetic points otherwise)");
  gen->add_option("--points", gen_points, "Synthetic point count");
  gen->add_option("--sites", gen_sites, "Number of candidate sites");
  gen->add_option("--customers", gen_customers, "Number of customers");
  gen->add_option("--pattern", gen_pattern, "PT1 or PT2");
  gen->add_option("--gamma", gen_gamma, "Capacity factor (1, 2 or 4)");
  gen->add_option("--setup", gen_setup, "Setup-cost variability: none, tenth, third");
  gen->add_option("--ell", gen_ell, "Assignment lower bounds: zero or positive");
  gen->add_option("--target-open", gen_target, "Facility count the capacity is sized for");

  // sample-scenarios
  Common smp_c;
  std::string smp_instance;
  std::size_t smp_count = 50;
  bool smp_corr = false;
  auto* smp = app.add_subcommand("sample-scenarios", "Sample a scenario set");
  add_common(smp, smp_c);
  smp->add_option("--instance", smp_instance, "Instance JSON")->required();
  smp->add_option("--scenarios", smp_count, "Number of scenarios");
  smp->add_flag("--correlated", smp_corr, "Spatially correlated demands");

  // build-model
  Common bld_c;
  std::string bld_instance, bld_scen, bld_policy = "fo", bld_format = "mps";
  bool bld_cuts = true;
  auto* bld = app.add_subcommand("build-model", "Build a policy MILP and export it");
  add_common(bld, bld_c);
  bld->add_option("--instance", bld_instance, "Instance JSON")->required();
  bld->add_option("--scenarios", bld_scen, "Scenario JSON")->required();
  bld->add_option("--policy", bld_policy, "fo, cdco, odco or ro");
  bld->add_flag("--cuts,!--no-cuts", bld_cuts, "Add the FO valid inequalities (default on)");
  bld->add_option("--format", bld_format, "mps or lp")->check(CLI::IsMember({"mps", "lp"}));

  // eval
  Common ev_c;
  std::string ev_instance, ev_scen, ev_policy = "fo", ev_solution;
  auto* ev = app.add_subcommand("eval", "Evaluate a first-stage solution under a policy");
  add_common(ev, ev_c);
  ev->add_option("--instance", ev_instance, "Instance JSON")->required();
  ev->add_option("--scenarios", ev_scen, "Scenario JSON")->required();
  ev->add_option("--policy", ev_policy, "fo, cdco, odco or ro");
  ev->add_option("--solution", ev_solution, "Solution JSON")->required();

  // solve
  Common sol_c;
  std::string sol_instance, sol_scen, sol_policy = "fo", sol_method = "bb", sol_cmd;
  double sol_time = std::numeric_limits<double>::infinity();
  std::int64_t sol_nodes = std::numeric_limits<std::int64_t>::max();
  auto* sol = app.add_subcommand("solve", "Solve one policy exactly");
  add_common(sol, sol_c);
  sol->add_option("--instance", sol_instance, "Instance JSON")->required();
  sol->add_option("--scenarios", sol_scen, "Scenario JSON")->required();
  sol->add_option("--policy", sol_policy, "fo, cdco, odco or ro");
  sol->add_option("--method", sol_method, "bb, brute or external")
      ->check(CLI::IsMember({"bb", "brute", "external"}));
  sol->add_option("--solver-cmd", sol_cmd, "External command with {model} and {solution}");
  sol->add_option("--time-limit", sol_time, "Seconds");
  sol->add_option("--node-limit", sol_nodes, "Nodes");

  // cross-eval
  Common xe_c;
  std::string xe_instance, xe_scen;
  std::vector<std::string> xe_solutions;
  auto* xe = app.add_subcommand("cross-eval", "Cross-policy gap matrix for one instance");
  add_common(xe, xe_c);
  xe->add_option("--instance", xe_instance, "Instance JSON")->required();
  xe->add_option("--scenarios", xe_scen, "Scenario JSON")->required();
  xe->add_option("--solution", xe_solutions, "POLICY=PATH (others are solved exactly)");

  // run
  Common run_c;
  std::string run_config, run_policies;
  unsigned run_threads = 0;
  std::optional<double> run_time;
  std::optional<std::int64_t> run_nodes;
  auto* run = app.add_subcommand("run", "Run an experiment");
  add_common(run, run_c);
  run->add_option("--config", run_config, "Experiment JSON (default grid otherwise)");
  run->add_option("--threads", run_threads, "Worker threads (0: all cores)");
  run->add_option("--time-limit", run_time, "Seconds per solve");
  run->add_option("--node-limit", run_nodes, "Nodes per solve");
  run->add_option("--policies", run_policies, "Comma-separated policy list");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      GeneratorConfig cfg;
      cfg.coords = gen_coords.empty() ? synthetic_coords(gen_points, derive_seed(gen_c.seed, 0))
                                      : load_coords(gen_coords);
      cfg.n_sites = gen_sites;
      cfg.n_customers = gen_customers;
      cfg.pattern = parse_pattern(gen_pattern);
      cfg.gamma = gen_gamma;
      cfg.setup_variability = parse_setup_variability(gen_setup);
      cfg.ell_mode = parse_lower_bound_mode(gen_ell);
      cfg.target_open = gen_target;
      cfg.seed = gen_c.seed;
      emit(instance_to_json(generate_instance(cfg)), gen_c.out);
    } else if (*smp) {
      const auto inst = load_instance(smp_instance);
      const auto scen = smp_corr ? sample_correlated(inst, smp_count, smp_c.seed)
                                 : sample_independent(inst, smp_count, smp_c.seed);
      emit(scenarios_to_json(scen), smp_c.out);
    } else if (*bld) {
      const auto inst = load_instance(bld_instance);
      const auto scen = load_scenarios(bld_scen);
      const auto model = milp::build_model(parse_policy(bld_policy), inst, scen, bld_cuts);
      if (bld_c.out.empty() || bld_c.out == "-") {
        bld_format == "mps" ? milp::write_mps(model, std::cout) : milp::write_lp(model, std::cout);
      } else {
        bld_format == "mps" ? milp::export_mps(model, bld_c.out) : milp::export_lp(model, bld_c.out);
        std::cout << "variables " << model.num_variables() << "\nconstraints "
                  << model.num_constraints() << "\nbinaries " << model.num_binaries() << '\n';
      }
    } else if (*ev) {
      const auto inst = load_instance(ev_instance);
      const auto scen = load_scenarios(ev_scen);
      const auto s = load_solution(ev_solution, inst);
      const auto result = evaluate(parse_policy(ev_policy), inst, scen, s);
      std::cout << "expected_cost " << num(result.expected_cost) << '\n';
      if (!ev_c.out.empty()) {
        const auto& b = result.breakdown;
        emit({{"policy", std::string(policy_key(result.policy))},
              {"expected_cost", result.expected_cost},
              {"opening", b.opening},
              {"service", b.service},
              {"penalty", b.penalty},
              {"reassign", b.reassign}},
             ev_c.out);
      }
    } else if (*sol) {
      const auto inst = load_instance(sol_instance);
      const auto scen = load_scenarios(sol_scen);
      const Policy p = parse_policy(sol_policy);
      SolveResult r;
      if (sol_method == "brute") {
        r = brute_force(inst, scen, p);
      } else if (sol_method == "external") {
        ExternalOptions opt;
        opt.solver_cmd = sol_cmd;
        r = solve_via_export(inst, scen, p, opt);
      } else {
        Limits limits;
        limits.time_seconds = sol_time;
        limits.max_nodes = sol_nodes;
        r = branch_and_bound(inst, scen, p, limits);
      }
      std::cout << "status " << status_name(r.status) << "\nz_upper " << num(r.z_upper)
                << "\nz_lower " << num(r.z_lower) << "\ngap_pct " << num(r.gap()) << "\nnodes "
                << r.stats.nodes << '\n';
      if (!sol_c.out.empty()) emit(result_json(r), sol_c.out);
      if (r.status == SolveStatus::kInfeasible) return 3;
    } else if (*xe) {
      const auto inst = load_instance(xe_instance);
      const auto scen = load_scenarios(xe_scen);
      PerPolicy<std::optional<FirstStageSolution>> sols;
      PerPolicy<std::optional<double>> optima;
      PerPolicy<bool> proven{};
      for (const auto& spec : xe_solutions) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw InputError("--solution expects POLICY=PATH");
        const Policy p = parse_policy(spec.substr(0, eq));
        sols[policy_index(p)] = load_solution(spec.substr(eq + 1), inst);
        optima[policy_index(p)] = expected_total(inst, scen, *sols[policy_index(p)], p);
      }
      for (Policy p : kAllPolicies) {
        if (sols[policy_index(p)]) continue;
        const auto r = branch_and_bound(inst, scen, p);
        if (!r.best_solution) continue;
        sols[policy_index(p)] = r.best_solution;
        optima[policy_index(p)] = r.z_upper;
        proven[policy_index(p)] = r.status == SolveStatus::kOptimal;
      }
      const auto gm = cross_gap(inst, scen, sols, optima, proven);
      if (xe_c.out.empty() || xe_c.out == "-") {
        write_gap_csv(gm, std::cout);
      } else {
        std::ofstream f(xe_c.out);
        if (!f) throw InputError("cannot write " + xe_c.out);
        write_gap_csv(gm, f);
      }
    } else if (*run) {
      ExperimentConfig cfg = run_config.empty() ? ExperimentConfig{} : load_config(run_config);
      if (run->count("--seed")) cfg.seed = run_c.seed;
      if (!run_c.out.empty()) cfg.out_dir = run_c.out;
      if (run->count("--threads")) cfg.threads = run_threads;
      if (run_time) cfg.time_limit = *run_time;
      if (run_nodes) cfg.node_limit = *run_nodes;
      if (!run_policies.empty()) {
        cfg.policies.clear();
        std::stringstream ss(run_policies);
        for (std::string p; std::getline(ss, p, ',');) cfg.policies.push_back(parse_policy(p));
      }
      const auto report = run_experiment(cfg);
      std::size_t errors = 0;
      for (const auto& inst : report.instances) errors += inst.errors.size();
      std::cout << "instances " << report.instances.size() << "\nerrors " << errors
                << "\noutput " << cfg.out_dir.string() << '\n';
      for (Policy p : cfg.policies) {
        std::cout << "mean_open " << policy_label(p) << ' '
                  << csv_number(report.open_stats.mean[policy_index(p)]) << '\n';
      }
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
