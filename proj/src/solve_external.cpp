#include <chrono>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include <unordered_map>

#include "flpbd/milp.hpp"
#include "flpbd/solve.hpp"

namespace flpbd {
namespace {

std::optional<double> to_number(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

ExternalSolution parse_xml(std::string_view text) {
  ExternalSolution out;
  const std::string body(text);
  static const std::regex objective_re(R"(objectiveValue\s*=\s*"([^"]+)\")");
  std::smatch match;
  if (std::regex_search(body, match, objective_re)) {
    out.objective = to_number(match[1].str());
    if (!out.objective) throw ExternalSolverError("bad objectiveValue in solution file");
  }
  static const std::regex variable_re(R"(<variable\b([^>]*)>)");
  static const std::regex name_re(R"(\bname\s*=\s*"([^"]*)\")");
  static const std::regex value_re(R"(\bvalue\s*=\s*"([^"]*)\")");
  for (auto it = std::sregex_iterator(body.begin(), body.end(), variable_re);
       it != std::sregex_iterator(); ++it) {
    const std::string attrs = (*it)[1].str();
    std::smatch name, value;
    if (!std::regex_search(attrs, name, name_re) || !std::regex_search(attrs, value, value_re)) {
      throw ExternalSolverError("variable entry without name or value");
    }
    auto v = to_number(value[1].str());
    if (!v) throw ExternalSolverError("bad value for " + name[1].str());
    out.values.emplace_back(name[1].str(), *v);
  }
  return out;
}

ExternalSolution parse_plain(std::string_view text) {
  ExternalSolution out;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty() || tok[0][0] == '#') continue;
    const std::string head = lower(tok[0]);
    if (head == "objective" || head == "obj" || head == "objective:") {
      auto v = to_number(tok.back());
      if (!v) throw ExternalSolverError("bad objective line: " + line);
      out.objective = v;
      continue;
    }
    if (tok.size() != 2) continue;  // status lines and section headers
    auto v = to_number(tok[1]);
    if (!v) continue;
    out.values.emplace_back(tok[0], *v);
  }
  return out;
}

std::string replace_all(std::string s, const std::string& key, const std::string& value) {
  for (std::size_t pos = 0; (pos = s.find(key, pos)) != std::string::npos; pos += value.size()) {
    s.replace(pos, key.size(), value);
  }
  return s;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') out += "'\\''";
    else out += ch;
  }
  return out + "'";
}

}  // namespace

ExternalSolution parse_solution_text(std::string_view text) {
  ExternalSolution sol = text.find("<variable") != std::string_view::npos ||
                                 text.find("<CPLEXSolution") != std::string_view::npos
                             ? parse_xml(text)
                             : parse_plain(text);
  if (sol.values.empty()) throw ExternalSolverError("solution file lists no variables");
  return sol;
}

ExternalSolution parse_solution_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ExternalSolverError("cannot read solution file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_solution_text(buf.str());
}

SolveResult verify_external_solution(const Instance& inst, const ScenarioSet& scen,
                                     Policy policy, const ExternalSolution& ext,
                                     double mismatch_tol) {
  if (!ext.objective) throw ExternalSolverError("solution file carries no objective");
  std::unordered_map<std::string, double> value;
  for (const auto& [name, v] : ext.values) value[name] = v;
  FirstStageSolution sol(inst.n_sites, inst.n_customers);
  auto get = [&](const std::string& name) {
    auto it = value.find(name);
    // Solvers may omit zero-valued columns.
    return it == value.end() ? 0.0 : it->second;
  };
  for (std::size_t i = 0; i < inst.n_sites; ++i) {
    sol.set_open(i, get(milp::y_name(i)) > 0.5);
    for (std::size_t j = 0; j < inst.n_customers; ++j) {
      sol.set_assigned(i, j, get(milp::x_name(i, j)) > 0.5);
    }
  }
  if (auto verdict = check_first_stage_feasible(inst, sol); !verdict) {
    throw ExternalSolverError("external first stage is infeasible: " + verdict.violations.front());
  }
  SolveResult res;
  res.policy = policy;
  res.status = SolveStatus::kOptimal;
  res.evaluation = evaluate(policy, inst, scen, sol);
  res.z_upper = res.evaluation->expected_cost;
  res.best_solution = std::move(sol);
  if (!approx_equal_rel(*ext.objective, res.z_upper, mismatch_tol)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "objective mismatch: solver reported " << *ext.objective << ", evaluator gives "
        << res.z_upper;
    throw ExternalSolverError(msg.str());
  }
  res.z_lower = std::min(*ext.objective, res.z_upper);
  return res;
}

SolveResult solve_via_export(const Instance& inst, const ScenarioSet& scen, Policy policy,
                             const ExternalOptions& options) {
  if (options.solver_cmd.empty()) throw ExternalSolverError("no solver command given");
  std::filesystem::path dir = options.work_dir;
  bool made_temp = false;
  if (dir.empty()) {
    std::string tmpl = (std::filesystem::temp_directory_path() / "flpbd-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw ExternalSolverError("cannot create a work directory");
    dir = tmpl;
    made_temp = true;
  } else {
    std::filesystem::create_directories(dir);
  }
  const auto start = std::chrono::steady_clock::now();
  const auto model_path = dir / ("model_" + std::string(policy_key(policy)) + ".mps");
  const auto solution_path = dir / ("model_" + std::string(policy_key(policy)) + ".sol");
  std::filesystem::remove(solution_path);
  milp::export_mps(milp::build_model(policy, inst, scen), model_path);

  std::string cmd = replace_all(options.solver_cmd, "{model}", shell_quote(model_path.string()));
  cmd = replace_all(cmd, "{solution}", shell_quote(solution_path.string()));
  const int rc = std::system(cmd.c_str());
  auto cleanup = [&] {
    if (made_temp && !options.keep_files) {
      std::error_code ec;
      std::filesystem::remove_all(dir, ec);
    }
  };
  if (rc != 0) {
    cleanup();
    const int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : rc;
    throw ExternalSolverError("external solver failed with exit code " + std::to_string(code) +
                              ": " + cmd);
  }
  try {
    auto res = verify_external_solution(inst, scen, policy, parse_solution_file(solution_path),
                                        options.mismatch_tol);
    res.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    cleanup();
    return res;
  } catch (...) {
    cleanup();
    throw;
  }
}

}  // namespace flpbd
