#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gems/checks.hpp"
#include "gems/config.hpp"
#include "gems/design.hpp"
#include "gems/misspec.hpp"
#include "gems/report.hpp"
#include "gems/simulation.hpp"

namespace {

using gems::ExperimentConfig;
using gems::Json;

struct Overrides {
  std::uint64_t seed = 0;
  int trials = 0;
  double zeta = 0.0;
  std::string out;
  bool trace = false;
};

void attach_common(CLI::App* sub, std::string& config_path, Overrides& ov) {
  sub->add_option("--config", config_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", ov.seed, "override the master seed");
  sub->add_option("--trials", ov.trials, "override the trial count");
  sub->add_option("--zeta", ov.zeta, "override the rounding slack");
  sub->add_option("--out", ov.out, "output path prefix");
  sub->add_flag("--trace", ov.trace, "write a JSON-lines event log");
}

ExperimentConfig load_with_overrides(const CLI::App* sub,
                                     const std::string& path,
                                     const Overrides& ov) {
  std::ifstream in(path);
  Json j;
  in >> j;
  if (sub->count("--seed")) j["seed"] = ov.seed;
  if (sub->count("--trials")) j["trials"] = ov.trials;
  if (sub->count("--zeta")) j["zeta"] = ov.zeta;
  if (sub->count("--out")) j["out"] = ov.out;
  if (sub->count("--trace")) j["trace"] = true;
  return gems::parse_config(j);
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
}

// shared emit convention: files under the prefix, or JSON to stdout
void emit(const ExperimentConfig& cfg, const std::string& json_body,
          const std::string& csv_body) {
  if (cfg.out.empty()) {
    std::cout << json_body;
    return;
  }
  write_file(cfg.out + ".json", json_body);
  write_file(cfg.out + ".csv", csv_body);
  std::cout << "wrote " << cfg.out << ".json and " << cfg.out << ".csv\n";
}

std::string csv_header(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "# config_hash=" << gems::config_hash_hex(cfg) << "\n";
  out << "# seed=" << cfg.seed << "\n";
  return out.str();
}

int cmd_complexity(const ExperimentConfig& cfg, double eps, double delta) {
  const gems::Instance& inst = cfg.instance;
  double lb_fc = std::numeric_limits<double>::quiet_NaN();
  double lb_static = lb_fc;
  if (inst.intrinsic_dim()) {
    gems::ReferenceBounds b = gems::reference_bounds(inst, delta);
    lb_fc = b.fixed_conf_lower;
    lb_static = b.oracle_upper;
  }

  std::ostringstream csv;
  csv << csv_header(cfg);
  csv << "d,iota_star,rho_star,rho_star_eps,rho_tilde_eps,lb_fixed_conf,"
         "lb_noninteractive\n";
  Json rows = Json::array();
  for (int d = 1; d <= inst.dim(); ++d) {
    double is = gems::iota_star(inst, d);
    double rho = gems::compute_rho(inst, d);
    double rho_eps = gems::compute_rho(inst, d, eps);
    gems::ChebyshevFit fit = gems::chebyshev_fit(inst, d);
    double rho_tilde = gems::compute_rho_tilde(inst, d, eps, fit.theta);
    csv << d << ',' << gems::format_double(is) << ','
        << gems::format_double(rho) << ',' << gems::format_double(rho_eps)
        << ',' << gems::format_double(rho_tilde) << ','
        << gems::format_double(lb_fc) << ',' << gems::format_double(lb_static)
        << "\n";
    Json row = Json::object();
    row["d"] = d;
    row["iota_star"] = is;
    row["rho_star"] = rho;
    row["rho_star_eps"] = rho_eps;
    row["rho_tilde_eps"] = rho_tilde;
    row["lb_fixed_conf"] = lb_fc;
    row["lb_noninteractive"] = lb_static;
    rows.push_back(row);
  }
  Json j = Json::object();
  j["config_hash"] = gems::config_hash_hex(cfg);
  j["seed"] = cfg.seed;
  j["eps"] = eps;
  j["delta"] = delta;
  j["rows"] = rows;
  emit(cfg, j.dump(2) + "\n", csv.str());
  return 0;
}

int cmd_design(const ExperimentConfig& cfg, const std::string& mode, int d,
               double eps) {
  const gems::Instance& inst = cfg.instance;
  if (d < 1) d = inst.dim();
  gems::DesignSolution sol;
  if (mode == "iota") {
    std::vector<int> all(inst.num_targets());
    for (int z = 0; z < inst.num_targets(); ++z) all[z] = z;
    auto dirs = gems::pair_directions(inst, all, d);
    if (dirs.empty()) {
      sol.weights = gems::Vec::Constant(inst.num_arms(), 1.0 / inst.num_arms());
      sol.value = 0.0;
      sol.iterations = 0;
      sol.relative_gap = 0.0;
    } else {
      sol = gems::solve_design(dirs, gems::truncate_cols(inst.arms(), d));
    }
  } else if (mode == "rho") {
    sol = gems::solve_rho_design(inst, d, eps);
  } else {
    std::cerr << "error: unknown design mode \"" << mode << "\"\n";
    return 2;
  }
  Json j = Json::object();
  j["config_hash"] = gems::config_hash_hex(cfg);
  j["seed"] = cfg.seed;
  j["mode"] = mode;
  j["d"] = d;
  j["eps"] = eps;
  j["value"] = sol.value;
  j["iterations"] = sol.iterations;
  j["relative_gap"] = sol.relative_gap;
  Json w = Json::array();
  for (int i = 0; i < sol.weights.size(); ++i) w.push_back(sol.weights[i]);
  j["weights"] = w;

  std::ostringstream csv;
  csv << csv_header(cfg) << "arm,weight\n";
  for (int i = 0; i < sol.weights.size(); ++i)
    csv << i << ',' << gems::format_double(sol.weights[i]) << "\n";
  emit(cfg, j.dump(2) + "\n", csv.str());
  return 0;
}

int cmd_misspec(const ExperimentConfig& cfg, double eps) {
  const gems::Instance& inst = cfg.instance;
  const double zeta = cfg.opts.zeta;
  std::ostringstream csv;
  csv << csv_header(cfg);

  std::string d_star_note;
  try {
    int ds = gems::compute_d_star(inst, eps, zeta);
    d_star_note = std::to_string(ds);
  } catch (const gems::EpsilonUnreachable&) {
    d_star_note = "unreachable";
  }
  csv << "# d_star(" << gems::format_double(eps) << ")=" << d_star_note << "\n";
  csv << "d,gamma_tilde,gamma,bound\n";

  Json rows = Json::array();
  for (int d = 1; d <= inst.dim(); ++d) {
    gems::ChebyshevFit fit = gems::chebyshev_fit(inst, d);
    double gamma = gems::compute_gamma(inst, d, zeta);
    double bound =
        (16.0 + 16.0 * std::sqrt((1.0 + zeta) * d)) * fit.gamma_tilde;
    csv << d << ',' << gems::format_double(fit.gamma_tilde) << ','
        << gems::format_double(gamma) << ',' << gems::format_double(bound)
        << "\n";
    Json row = Json::object();
    row["d"] = d;
    row["gamma_tilde"] = fit.gamma_tilde;
    row["gamma"] = gamma;
    row["bound"] = bound;
    rows.push_back(row);
  }
  Json j = Json::object();
  j["config_hash"] = gems::config_hash_hex(cfg);
  j["seed"] = cfg.seed;
  j["eps"] = eps;
  j["d_star"] = d_star_note;
  j["rows"] = rows;
  emit(cfg, j.dump(2) + "\n", csv.str());
  return 0;
}

int cmd_run(const ExperimentConfig& cfg) {
  if (!cfg.has_algorithm) {
    std::cerr << "error: run needs an algorithm block in the config\n";
    return 2;
  }
  if (cfg.trace && cfg.out.empty()) {
    std::cerr << "error: --trace needs --out (or \"out\" in the config)\n";
    return 2;
  }
  gems::BatchReport rep = gems::run_batch(cfg.instance, cfg.algo, cfg.trials,
                                          cfg.seed, cfg.noise, cfg.opts);
  emit(cfg, gems::batch_report_json(rep, cfg), gems::batch_report_csv(rep, cfg));
  if (cfg.trace) {
    write_file(cfg.out + ".trace.jsonl", gems::batch_trace_lines(rep));
    std::cout << "wrote " << cfg.out << ".trace.jsonl\n";
  }
  return 0;
}

int cmd_validate(const std::string& suite) {
  std::vector<std::string> todo;
  if (suite == "all")
    todo = gems::suite_names();
  else
    todo.push_back(suite);
  bool all_pass = true;
  for (const std::string& name : todo) {
    gems::SuiteResult res = gems::run_suite(name);
    if (res.pass) {
      std::cout << "[PASS] " << name << "\n" << res.report;
    } else {
      all_pass = false;
      std::cerr << "[FAIL] " << name << "\n" << res.report;
    }
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"model-selection simulator for pure-exploration linear bandits"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  double eps = 0.1;
  double delta = 0.1;
  std::string mode = "iota";
  int d = 0;
  std::string suite;

  CLI::App* complexity =
      app.add_subcommand("complexity", "per-dimension complexity table");
  attach_common(complexity, config_path, ov);
  complexity->add_option("--eps", eps, "relaxation for the eps columns");
  complexity->add_option("--delta", delta, "confidence for the bound columns");

  CLI::App* design = app.add_subcommand("design", "solve one optimal design");
  attach_common(design, config_path, ov);
  design->add_option("--mode", mode, "iota or rho");
  design->add_option("--d", d, "truncation dimension (default: ambient)");
  design->add_option("--eps", eps, "gap floor for rho mode");

  CLI::App* misspec =
      app.add_subcommand("misspec", "misspecification levels per dimension");
  attach_common(misspec, config_path, ov);
  misspec->add_option("--eps", eps, "target optimality for d_star");

  CLI::App* run = app.add_subcommand("run", "run a Monte Carlo batch");
  attach_common(run, config_path, ov);

  CLI::App* validate =
      app.add_subcommand("validate", "run a named property suite");
  validate->add_option("suite", suite, "suite name or \"all\"")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(suite);
    CLI::App* sub = app.get_subcommands().front();
    ExperimentConfig cfg = load_with_overrides(sub, config_path, ov);
    if (complexity->parsed()) return cmd_complexity(cfg, eps, delta);
    if (design->parsed()) return cmd_design(cfg, mode, d, eps);
    if (misspec->parsed()) return cmd_misspec(cfg, eps);
    if (run->parsed()) return cmd_run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
