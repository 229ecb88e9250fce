#include "flpbd/experiment.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "flpbd/random.hpp"
#include "flpbd/scenario.hpp"

namespace flpbd {
namespace {

struct Job {
  InstanceReport meta;
  Instance inst;
  ScenarioSet scen;
};

template <typename T>
std::vector<T> json_list(const nlohmann::json& doc, const char* key, std::vector<T> fallback) {
  if (!doc.contains(key)) return fallback;
  return doc.at(key).get<std::vector<T>>();
}

std::string grid_id(std::size_t k, std::size_t m, std::size_t n, std::size_t w, bool corr,
                    int gamma, DemandPattern p) {
  std::ostringstream id;
  id << 'g' << (k < 10 ? "00" : k < 100 ? "0" : "") << k << "_I" << m << "_J" << n << "_W" << w
     << '_' << (corr ? 'C' : 'U') << "_g" << gamma << '_' << pattern_name(p);
  return id.str();
}

std::vector<Job> make_jobs(const ExperimentConfig& cfg) {
  std::vector<Job> jobs;
  if (cfg.instance_file) {
    Job job;
    job.inst = load_instance(*cfg.instance_file);
    job.scen = cfg.scenario_file ? load_scenarios(*cfg.scenario_file)
               : cfg.correlated ? sample_correlated(job.inst, cfg.n_scenarios, derive_seed(cfg.seed, 1))
                                : sample_independent(job.inst, cfg.n_scenarios, derive_seed(cfg.seed, 1));
    require_compatible(job.inst, job.scen);
    job.meta.id = cfg.instance_file->stem().string();
    job.meta.n_sites = job.inst.n_sites;
    job.meta.n_customers = job.inst.n_customers;
    job.meta.n_scenarios = job.scen.size();
    job.meta.correlated = cfg.correlated && !cfg.scenario_file;
    jobs.push_back(std::move(job));
    return jobs;
  }
  const auto& g = cfg.grid;
  const auto coords = g.coords_file ? load_coords(*g.coords_file)
                                    : synthetic_coords(g.points, derive_seed(cfg.seed, 0));
  std::size_t k = 0;
  for (std::size_t m : g.sites) {
    for (std::size_t n : g.customers) {
      for (std::size_t w : g.scenarios) {
        for (bool corr : g.correlated) {
          for (int gamma : g.gammas) {
            for (DemandPattern pattern : g.patterns) {
              GeneratorConfig gc;
              gc.coords = coords;
              gc.n_sites = m;
              gc.n_customers = n;
              gc.pattern = pattern;
              gc.gamma = gamma;
              gc.setup_variability = g.setup;
              gc.ell_mode = g.ell;
              gc.target_open = g.target_open;
              gc.seed = derive_seed(cfg.seed, 1000 + k);
              Job job;
              job.inst = generate_instance(gc);
              const auto scen_seed = derive_seed(cfg.seed, 1'000'000 + k);
              job.scen = corr ? sample_correlated(job.inst, w, scen_seed)
                              : sample_independent(job.inst, w, scen_seed);
              job.meta.id = grid_id(k, m, n, w, corr, gamma, pattern);
              job.meta.n_sites = m;
              job.meta.n_customers = n;
              job.meta.n_scenarios = w;
              job.meta.correlated = corr;
              job.meta.gamma = gamma;
              job.meta.pattern = std::string(pattern_name(pattern));
              jobs.push_back(std::move(job));
              ++k;
            }
          }
        }
      }
    }
  }
  return jobs;
}

void run_job(const ExperimentConfig& cfg, Job& job) {
  auto& rep = job.meta;
  for (Policy p : cfg.policies) {
    try {
      SolveResult res;
      if (cfg.solver == SolverChoice::kInternal) {
        Limits limits;
        limits.time_seconds = cfg.time_limit;
        limits.max_nodes = cfg.node_limit;
        res = branch_and_bound(job.inst, job.scen, p, limits);
      } else {
        ExternalOptions opt;
        opt.solver_cmd = cfg.solver_cmd;
        res = solve_via_export(job.inst, job.scen, p, opt);
      }
      rep.results[policy_index(p)] = std::move(res);
    } catch (const std::exception& e) {
      rep.errors.push_back(std::string(policy_label(p)) + ": " + e.what());
    }
  }
  PerPolicy<std::optional<FirstStageSolution>> sols;
  PerPolicy<std::optional<double>> optima;
  PerPolicy<bool> proven{};
  for (std::size_t k = 0; k < kNumPolicies; ++k) {
    const auto& r = rep.results[k];
    if (!r || !r->best_solution) continue;
    sols[k] = r->best_solution;
    optima[k] = r->z_upper;
    proven[k] = r->status == SolveStatus::kOptimal;
    rep.costs.push_back(cost_breakdown(*r->evaluation));
  }
  try {
    rep.gaps = cross_gap(job.inst, job.scen, sols, optima, proven);
  } catch (const std::exception& e) {
    rep.errors.push_back(std::string("cross-eval: ") + e.what());
  }
}

void write_file(const std::filesystem::path& path, const std::string& text,
                std::vector<std::filesystem::path>& files) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  files.push_back(path);
}

std::string csv_text(std::string s) {
  for (auto& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
  }
  return s;
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.policies.empty()) throw InputError("experiment needs at least one policy");
  if (!(cfg.time_limit >= 0.0)) throw InputError("time limit must be nonnegative");
  if (cfg.node_limit < 0) throw InputError("node limit must be nonnegative");
  if (cfg.solver == SolverChoice::kExternal && cfg.solver_cmd.empty()) {
    throw InputError("external solver needs solver_cmd");
  }
  if (cfg.instance_file) {
    if (!cfg.scenario_file && cfg.n_scenarios < 1) throw InputError("need at least one scenario");
    return;
  }
  const auto& g = cfg.grid;
  if (g.sites.empty() || g.customers.empty() || g.scenarios.empty() || g.correlated.empty() ||
      g.gammas.empty() || g.patterns.empty()) {
    throw InputError("every grid dimension needs at least one value");
  }
  for (auto w : g.scenarios) {
    if (w < 1) throw InputError("need at least one scenario");
  }
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  ExperimentConfig cfg;
  if (doc.contains("instance")) cfg.instance_file = doc.at("instance").get<std::string>();
  if (doc.contains("scenarios")) cfg.scenario_file = doc.at("scenarios").get<std::string>();
  cfg.n_scenarios = doc.value("n_scenarios", cfg.n_scenarios);
  cfg.correlated = doc.value("correlated", cfg.correlated);
  if (doc.contains("policies")) {
    cfg.policies.clear();
    for (const auto& p : doc.at("policies")) cfg.policies.push_back(parse_policy(p.get<std::string>()));
  }
  const std::string solver = doc.value("solver", std::string("internal"));
  if (solver == "internal") cfg.solver = SolverChoice::kInternal;
  else if (solver == "external") cfg.solver = SolverChoice::kExternal;
  else throw InputError("solver must be internal or external");
  cfg.solver_cmd = doc.value("solver_cmd", cfg.solver_cmd);
  cfg.time_limit = doc.value("time_limit", cfg.time_limit);
  cfg.node_limit = doc.value("node_limit", cfg.node_limit);
  cfg.out_dir = doc.value("out", cfg.out_dir.string());
  cfg.seed = doc.value("seed", cfg.seed);
  cfg.threads = doc.value("threads", cfg.threads);
  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    auto& grid = cfg.grid;
    grid.sites = json_list(g, "sites", grid.sites);
    grid.customers = json_list(g, "customers", grid.customers);
    grid.scenarios = json_list(g, "scenarios", grid.scenarios);
    if (g.contains("correlation")) {
      grid.correlated.clear();
      for (const auto& c : g.at("correlation")) {
        if (c.is_boolean()) {
          grid.correlated.push_back(c.get<bool>());
          continue;
        }
        const auto s = c.get<std::string>();
        if (s == "independent" || s == "U") grid.correlated.push_back(false);
        else if (s == "correlated" || s == "C") grid.correlated.push_back(true);
        else throw InputError("unknown correlation mode " + s);
      }
    }
    grid.gammas = json_list(g, "gamma", grid.gammas);
    if (g.contains("pattern")) {
      grid.patterns.clear();
      for (const auto& p : g.at("pattern")) grid.patterns.push_back(parse_pattern(p.get<std::string>()));
    }
    if (g.contains("setup")) grid.setup = parse_setup_variability(g.at("setup").get<std::string>());
    if (g.contains("ell")) grid.ell = parse_lower_bound_mode(g.at("ell").get<std::string>());
    if (g.contains("coords") && !g.at("coords").is_null()) {
      grid.coords_file = g.at("coords").get<std::string>();
    }
    grid.points = g.value("points", grid.points);
    grid.target_open = g.value("target_open", grid.target_open);
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("bad config " + path.string() + ": " + e.what());
  }
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  auto jobs = make_jobs(cfg);

  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1)));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) run_job(cfg, jobs[k]);
      });
    }
  }

  ExperimentReport report;
  const auto& out = cfg.out_dir;
  std::filesystem::create_directories(out / "gaps");
  std::filesystem::create_directories(out / "instances");

  std::ostringstream results, costs, timings, summary;
  results << "instance,sites,customers,scenarios,correlation,gamma,pattern,policy,status,"
             "z_upper,z_lower,gap_pct,nodes,open_facilities,error\n";
  costs << "instance,policy,component,share,value\n";
  timings << "instance policy seconds\n";
  std::vector<GapMatrix> matrices;
  std::vector<PerPolicy<std::optional<FirstStageSolution>>> batch;

  struct Group {
    std::size_t instances = 0, optimal = 0;
    double gap_sum = 0.0, z_sum = 0.0, open_sum = 0.0;
    std::size_t gap_count = 0;
  };
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>, Group> groups;

  for (auto& job : jobs) {
    const auto& r = job.meta;
    save_instance(job.inst, out / "instances" / (r.id + ".json"));
    save_scenarios(job.scen, out / "instances" / (r.id + "_scenarios.json"));
    report.files.push_back(out / "instances" / (r.id + ".json"));
    report.files.push_back(out / "instances" / (r.id + "_scenarios.json"));
    const std::string head = r.id + ',' + std::to_string(r.n_sites) + ',' +
                             std::to_string(r.n_customers) + ',' + std::to_string(r.n_scenarios) +
                             ',' + (r.correlated ? "C" : "U") + ',' +
                             (r.gamma ? std::to_string(r.gamma) : "") + ',' + r.pattern + ',';
    PerPolicy<std::optional<FirstStageSolution>> sols;
    for (Policy p : cfg.policies) {
      const auto& res = r.results[policy_index(p)];
      results << head << policy_label(p) << ',';
      auto& grp = groups[{r.n_sites, r.n_customers, r.n_scenarios, policy_index(p)}];
      ++grp.instances;
      if (!res) {
        std::string err;
        for (const auto& e : r.errors) {
          if (e.starts_with(std::string(policy_label(p)) + ":")) err = e;
        }
        results << "error,,,,,," << csv_text(err) << '\n';
        continue;
      }
      const double open = res->best_solution ? static_cast<double>(res->best_solution->open_count())
                                             : std::nan("");
      results << status_name(res->status) << ',' << csv_number(res->z_upper) << ','
              << csv_number(res->z_lower) << ',' << csv_number(res->gap()) << ','
              << res->stats.nodes << ',' << csv_number(open) << ",\n";
      timings << r.id << ' ' << policy_key(p) << ' ' << res->stats.wall_seconds << '\n';
      if (res->status == SolveStatus::kOptimal) ++grp.optimal;
      if (std::isfinite(res->gap())) {
        grp.gap_sum += res->gap();
        ++grp.gap_count;
      }
      if (res->best_solution) {
        grp.z_sum += res->z_upper;
        grp.open_sum += open;
        sols[policy_index(p)] = res->best_solution;
      }
    }
    for (const auto& cs : r.costs) {
      const std::pair<const char*, double> parts[] = {{"opening", cs.opening},
                                                      {"service", cs.service},
                                                      {"penalty", cs.penalty},
                                                      {"reassign", cs.reassign}};
      for (const auto& [name, share] : parts) {
        costs << r.id << ',' << policy_label(cs.policy) << ',' << name << ','
              << csv_number(share) << ',' << csv_number(share * cs.total) << '\n';
      }
    }
    if (r.gaps) {
      std::ostringstream g;
      write_gap_csv(*r.gaps, g);
      write_file(out / "gaps" / ("gap_" + r.id + ".csv"), g.str(), report.files);
      matrices.push_back(*r.gaps);
    }
    batch.push_back(std::move(sols));
  }

  summary << "sites,customers,scenarios,policy,instances,optimal,mean_gap_pct,mean_z_upper,"
             "mean_open_facilities\n";
  for (const auto& [key, grp] : groups) {
    const auto [m, n, w, p] = key;
    const auto solved = static_cast<double>(grp.instances);
    summary << m << ',' << n << ',' << w << ',' << policy_label(kAllPolicies[p]) << ','
            << grp.instances << ',' << grp.optimal << ','
            << csv_number(grp.gap_count ? grp.gap_sum / static_cast<double>(grp.gap_count) : std::nan(""))
            << ',' << csv_number(grp.z_sum / solved) << ',' << csv_number(grp.open_sum / solved)
            << '\n';
  }

  report.gap_summary = summarize_gaps(matrices);
  std::ostringstream gap_mean;
  write_gap_summary_csv(report.gap_summary, gap_mean);

  std::ostringstream open_csv;
  open_csv << "policy,mean_open_facilities,instances\n";
  if (!batch.empty()) {
    report.open_stats = open_facility_stats(batch);
    for (Policy p : cfg.policies) {
      open_csv << policy_label(p) << ',' << csv_number(report.open_stats.mean[policy_index(p)])
               << ',' << report.open_stats.count[policy_index(p)] << '\n';
    }
  }

  write_file(out / "results.csv", results.str(), report.files);
  write_file(out / "gap_mean.csv", gap_mean.str(), report.files);
  write_file(out / "cost_structure.csv", costs.str(), report.files);
  write_file(out / "open_facilities.csv", open_csv.str(), report.files);
  write_file(out / "summary.csv", summary.str(), report.files);
  write_file(out / "timings.txt", timings.str(), report.files);

  for (auto& job : jobs) report.instances.push_back(std::move(job.meta));
  return report;
}

}  // namespace flpbd
