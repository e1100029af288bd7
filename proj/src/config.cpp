#include "gems/config.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "gems/rounding.hpp"

namespace gems {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument("config: " + msg);
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const char* where) {
  if (!j.is_object()) fail(std::string(where) + " must be an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) ok = true;
    if (!ok) fail("unknown key \"" + item.key() + "\" in " + where);
  }
}

Mat parse_points(const Json& j, const char* where) {
  if (!j.is_array() || j.empty())
    fail(std::string(where) + " must be a non-empty array of points");
  const size_t dim = j.at(0).size();
  Mat m(dim, j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    const Json& p = j.at(i);
    if (!p.is_array() || p.size() != dim)
      fail(std::string(where) + " points must share one dimension");
    for (size_t r = 0; r < dim; ++r) m(r, i) = p.at(r).get<double>();
  }
  return m;
}

Vec parse_vec(const Json& j, const char* where) {
  if (!j.is_array()) fail(std::string(where) + " must be an array");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

Json points_json(const Mat& m) {
  Json arr = Json::array();
  for (int i = 0; i < m.cols(); ++i) {
    Json p = Json::array();
    for (int r = 0; r < m.rows(); ++r) p.push_back(m(r, i));
    arr.push_back(p);
  }
  return arr;
}

Json vec_json(const Vec& v) {
  Json arr = Json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

NoiseSpec parse_noise(const Json& j) {
  NoiseSpec n;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "gaussian_unit") n.kind = NoiseKind::gaussian_unit;
    else if (s == "none") n.kind = NoiseKind::none;
    else fail("unknown noise \"" + s + "\"");
    return n;
  }
  check_keys(j, {"kind", "bound"}, "noise");
  const std::string s = j.at("kind").get<std::string>();
  if (s == "gaussian_unit") n.kind = NoiseKind::gaussian_unit;
  else if (s == "none") n.kind = NoiseKind::none;
  else if (s == "bounded") n.kind = NoiseKind::bounded;
  else fail("unknown noise kind \"" + s + "\"");
  if (j.contains("bound")) {
    if (n.kind != NoiseKind::bounded) fail("bound only applies to bounded noise");
    n.bound = j.at("bound").get<double>();
  }
  return n;
}

}  // namespace

Instance parse_instance(const Json& j) {
  if (!j.is_object()) fail("instance must be an object");
  if (j.contains("generator")) {
    const std::string g = j.at("generator").get<std::string>();
    if (g == "hard") {
      check_keys(j, {"generator", "d_star", "eps", "with_x0"}, "instance");
      return make_hard_instance(j.at("d_star").get<int>(),
                                j.at("eps").get<double>(),
                                j.value("with_x0", false));
    }
    if (g == "unverifiable") {
      check_keys(j, {"generator", "dim"}, "instance");
      return make_unverifiable_instance(j.at("dim").get<int>());
    }
    fail("unknown generator \"" + g + "\"");
  }
  check_keys(j,
             {"arms", "targets", "rewards", "target_rewards", "theta",
              "intrinsic_dim"},
             "instance");
  if (!j.contains("arms")) fail("instance needs arms");
  Mat arms = parse_points(j.at("arms"), "arms");
  Mat targets;
  if (j.contains("targets")) targets = parse_points(j.at("targets"), "targets");
  std::optional<int> intrinsic;
  if (j.contains("intrinsic_dim")) intrinsic = j.at("intrinsic_dim").get<int>();
  if (j.contains("theta")) {
    if (j.contains("rewards") || j.contains("target_rewards"))
      fail("give either theta or reward tables, not both");
    return Instance::linear(arms, targets, parse_vec(j.at("theta"), "theta"),
                            intrinsic);
  }
  if (!j.contains("rewards")) fail("instance needs rewards or theta");
  Vec rewards = parse_vec(j.at("rewards"), "rewards");
  Vec target_rewards;
  if (j.contains("target_rewards")) {
    if (!j.contains("targets")) fail("target_rewards without targets");
    target_rewards = parse_vec(j.at("target_rewards"), "target_rewards");
  } else {
    if (j.contains("targets")) fail("targets without target_rewards");
    target_rewards = rewards;
  }
  return Instance(arms, rewards, targets, target_rewards, std::nullopt,
                  intrinsic);
}

namespace {

Json canonical_instance(const Json& j, const Instance& inst) {
  Json c = Json::object();
  if (j.contains("generator")) {
    c["generator"] = j.at("generator");
    if (j.at("generator") == "hard") {
      c["d_star"] = j.at("d_star").get<int>();
      c["eps"] = j.at("eps").get<double>();
      c["with_x0"] = j.value("with_x0", false);
    } else {
      c["dim"] = j.at("dim").get<int>();
    }
    return c;
  }
  c["arms"] = points_json(inst.arms());
  c["targets"] = points_json(inst.targets());
  if (inst.theta()) {
    c["theta"] = vec_json(*inst.theta());
  } else {
    Json r = Json::array();
    for (int i = 0; i < inst.num_arms(); ++i) r.push_back(inst.arm_reward(i));
    c["rewards"] = r;
    Json tr = Json::array();
    for (int z = 0; z < inst.num_targets(); ++z)
      tr.push_back(inst.target_reward(z));
    c["target_rewards"] = tr;
  }
  if (inst.intrinsic_dim()) c["intrinsic_dim"] = *inst.intrinsic_dim();
  return c;
}

}  // namespace

ExperimentConfig parse_config(const Json& j) {
  check_keys(j,
             {"instance", "algorithm", "trials", "seed", "zeta", "noise",
              "out", "trace", "dedup_candidates", "r_d_formula"},
             "config");
  if (!j.contains("instance")) fail("missing instance");

  ExperimentConfig cfg{parse_instance(j.at("instance"))};

  if (j.contains("algorithm")) {
    const Json& a = j.at("algorithm");
    check_keys(a,
               {"name", "delta", "eps", "n", "budget", "t_budget", "max_ell",
                "n_pulls", "d"},
               "algorithm");
    if (!a.contains("name")) fail("algorithm needs a name");
    auto name = parse_algo_name(a.at("name").get<std::string>());
    if (!name)
      fail("unknown algorithm \"" + a.at("name").get<std::string>() + "\"");
    cfg.has_algorithm = true;
    cfg.algo.name = *name;
    cfg.algo.delta = a.value("delta", cfg.algo.delta);
    cfg.algo.eps = a.value("eps", cfg.algo.eps);
    cfg.algo.n = a.value("n", cfg.algo.n);
    cfg.algo.budget = a.value("budget", cfg.algo.budget);
    cfg.algo.t_budget = a.value("t_budget", cfg.algo.t_budget);
    cfg.algo.max_ell = a.value("max_ell", cfg.algo.max_ell);
    cfg.algo.n_pulls = a.value("n_pulls", cfg.algo.n_pulls);
    cfg.algo.d = a.value("d", cfg.algo.d);
  }

  cfg.trials = j.value("trials", cfg.trials);
  if (cfg.trials < 1) fail("trials must be >= 1");
  cfg.seed = j.value("seed", cfg.seed);
  cfg.opts.zeta = j.value("zeta", cfg.opts.zeta);
  if (j.contains("noise")) cfg.noise = parse_noise(j.at("noise"));
  cfg.out = j.value("out", cfg.out);
  cfg.trace = j.value("trace", cfg.trace);
  cfg.opts.dedup_candidates =
      j.value("dedup_candidates", cfg.opts.dedup_candidates);
  if (j.contains("r_d_formula")) {
    const std::string f = j.at("r_d_formula").get<std::string>();
    if (f == "quadratic") cfg.opts.rd_formula = RdFormula::quadratic;
    else if (f == "linear_alt") cfg.opts.rd_formula = RdFormula::linear_alt;
    else fail("unknown r_d_formula \"" + f + "\"");
  }

  Json c = Json::object();
  c["instance"] = canonical_instance(j.at("instance"), cfg.instance);
  Json ca = Json::object();
  ca["name"] = algo_name_string(cfg.algo.name);
  ca["delta"] = cfg.algo.delta;
  ca["eps"] = cfg.algo.eps;
  ca["n"] = cfg.algo.n;
  ca["budget"] = cfg.algo.budget;
  ca["t_budget"] = cfg.algo.t_budget;
  ca["max_ell"] = cfg.algo.max_ell;
  ca["n_pulls"] = cfg.algo.n_pulls;
  ca["d"] = cfg.algo.d;
  c["algorithm"] = ca;
  c["trials"] = cfg.trials;
  c["seed"] = cfg.seed;
  c["zeta"] = cfg.opts.zeta;
  Json cn = Json::object();
  cn["kind"] = cfg.noise.kind == NoiseKind::gaussian_unit ? "gaussian_unit"
               : cfg.noise.kind == NoiseKind::none        ? "none"
                                                          : "bounded";
  cn["bound"] = cfg.noise.bound;
  c["noise"] = cn;
  c["out"] = cfg.out;
  c["trace"] = cfg.trace;
  c["dedup_candidates"] = cfg.opts.dedup_candidates;
  c["r_d_formula"] =
      cfg.opts.rd_formula == RdFormula::quadratic ? "quadratic" : "linear_alt";
  cfg.canonical = c;
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    fail(path + ": " + e.what());
  }
  return parse_config(j);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  return fnv1a(cfg.canonical.dump());
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  return buf;
}

}  // namespace gems
