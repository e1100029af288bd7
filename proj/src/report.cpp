#include "gems/report.hpp"

#include <cstdio>
#include <sstream>

namespace gems {

namespace {

Json bounds_json(const ReferenceBounds& b) {
  Json j = Json::object();
  j["d_star"] = b.d_star;
  j["rho_star"] = b.rho_star;
  j["fixed_conf_lower"] = b.fixed_conf_lower;
  j["oracle_upper"] = b.oracle_upper;
  j["subroutine_budget_error"] = b.subroutine_budget_error;
  j["master_budget_error"] = b.master_budget_error;
  return j;
}

Json trial_json(const TrialResult& r) {
  Json j = Json::object();
  j["trial"] = r.trial;
  j["recommendation"] = r.recommendation;
  j["correct"] = r.correct;
  j["samples"] = r.samples;
  if (r.first_correct_at)
    j["first_correct_at"] = *r.first_correct_at;
  else
    j["first_correct_at"] = nullptr;
  j["failed"] = r.failed;
  if (r.failed) j["error"] = r.error;
  if (!r.active.empty()) j["active"] = r.active;
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string batch_report_json(const BatchReport& rep,
                              const ExperimentConfig& cfg) {
  Json j = Json::object();
  j["config_hash"] = config_hash_hex(cfg);
  j["seed"] = cfg.seed;
  j["algorithm"] = algo_name_string(cfg.algo.name);
  j["config"] = cfg.canonical;
  j["trials"] = rep.trials;
  j["errors"] = rep.errors;
  j["failures"] = rep.failures;
  j["error_rate"] = rep.error_rate;
  j["error_ci_low"] = rep.ci_low;
  j["error_ci_high"] = rep.ci_high;
  j["mean_samples"] = rep.mean_samples;
  j["min_samples"] = rep.min_samples;
  j["q50_samples"] = rep.q50_samples;
  j["q90_samples"] = rep.q90_samples;
  j["max_samples"] = rep.max_samples;
  j["first_correct_count"] = rep.first_correct_count;
  if (rep.mean_first_correct)
    j["mean_first_correct"] = *rep.mean_first_correct;
  else
    j["mean_first_correct"] = nullptr;
  if (rep.bounds)
    j["reference_bounds"] = bounds_json(*rep.bounds);
  else
    j["reference_bounds"] = nullptr;
  Json trials = Json::array();
  for (const TrialResult& r : rep.results) trials.push_back(trial_json(r));
  j["results"] = trials;
  return j.dump(2) + "\n";
}

std::string batch_report_csv(const BatchReport& rep,
                             const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "# config_hash=" << config_hash_hex(cfg) << "\n";
  out << "# seed=" << cfg.seed << "\n";
  out << "# algorithm=" << algo_name_string(cfg.algo.name) << "\n";
  out << "# trials=" << rep.trials << " errors=" << rep.errors
      << " failures=" << rep.failures << "\n";
  out << "# error_rate=" << format_double(rep.error_rate)
      << " ci_low=" << format_double(rep.ci_low)
      << " ci_high=" << format_double(rep.ci_high) << "\n";
  out << "# mean_samples=" << format_double(rep.mean_samples)
      << " q50=" << format_double(rep.q50_samples)
      << " q90=" << format_double(rep.q90_samples) << "\n";
  if (rep.bounds) {
    const ReferenceBounds& b = *rep.bounds;
    out << "# rho_star=" << format_double(b.rho_star)
        << " fixed_conf_lower=" << format_double(b.fixed_conf_lower)
        << " oracle_upper=" << format_double(b.oracle_upper)
        << " subroutine_budget_error="
        << format_double(b.subroutine_budget_error)
        << " master_budget_error=" << format_double(b.master_budget_error)
        << "\n";
  }
  out << "trial,recommendation,correct,samples,first_correct_at,failed\n";
  for (const TrialResult& r : rep.results) {
    out << r.trial << ',' << r.recommendation << ',' << (r.correct ? 1 : 0)
        << ',' << r.samples << ',';
    if (r.first_correct_at) out << *r.first_correct_at;
    out << ',' << (r.failed ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string batch_trace_lines(const BatchReport& rep) {
  std::ostringstream out;
  for (const TrialResult& r : rep.results) {
    for (const IterationTrace& it : r.iterations) {
      Json j = Json::object();
      j["trial"] = r.trial;
      j["event"] = "iteration";
      j["k"] = it.k;
      j["d_k"] = it.d_k;
      j["N_k"] = it.n_k;
      j["active_size"] = it.active_size;
      j["pulls_total"] = it.pulls_total;
      out << j.dump() << "\n";
    }
    for (const ValidationTrace& v : r.validations) {
      Json j = Json::object();
      j["trial"] = r.trial;
      j["event"] = "validation";
      j["k"] = v.ell;
      j["d_k"] = 0;
      j["N_k"] = v.pulls_each;
      j["active_size"] = v.candidates;
      j["pulls_total"] = v.pulls_total;
      out << j.dump() << "\n";
    }
    for (const Emission& e : r.emissions) {
      Json j = Json::object();
      j["trial"] = r.trial;
      j["event"] = "recommendation";
      j["k"] = 0;
      j["d_k"] = 0;
      j["N_k"] = 0;
      j["active_size"] = 0;
      j["pulls_total"] = e.pulls;
      j["target"] = e.target;
      out << j.dump() << "\n";
    }
    if (r.emissions.empty()) {
      Json j = Json::object();
      j["trial"] = r.trial;
      j["event"] = "recommendation";
      j["k"] = 0;
      j["d_k"] = 0;
      j["N_k"] = 0;
      j["active_size"] = 0;
      j["pulls_total"] = r.samples;
      j["target"] = r.recommendation;
      out << j.dump() << "\n";
    }
  }
  return out.str();
}

}  // namespace gems
