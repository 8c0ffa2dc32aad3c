#include "rave/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace rave {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& what) {
  fail(ErrorCode::ConfigParse, what);
}

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& where) {
  if (!j.is_object()) parse_fail(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key)) parse_fail("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_to(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    parse_fail(std::string("bad value for '") + key + "': " + e.what());
  }
}

RiskKind risk_kind_from(const std::string& name) {
  if (name == "expectation") return RiskKind::Expectation;
  if (name == "mean_semidev") return RiskKind::MeanSemiDev;
  if (name == "avar") return RiskKind::AVaR;
  if (name == "smoothed_avar") return RiskKind::SmoothedAVaR;
  if (name == "epi_avar") return RiskKind::EpiAVaR;
  parse_fail("unknown risk kind '" + name + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  reject_unknown(j, {"problem", "mesh_nodes", "alpha", "bounds", "model",
                     "risk", "obstacle_data", "study", "optimizer",
                     "acceptance", "output"},
                 "config");
  ExperimentConfig c;

  if (j.contains("problem")) {
    const auto name = j.at("problem").get<std::string>();
    if (name == "semilinear") c.problem = ProblemKind::SemilinearTracking;
    else if (name == "obstacle") c.problem = ProblemKind::ObstacleTracking;
    else parse_fail("unknown problem '" + name + "'");
  }
  read_to(j, "mesh_nodes", c.mesh_nodes);
  read_to(j, "alpha", c.alpha);

  if (j.contains("bounds")) {
    const auto& b = j.at("bounds");
    reject_unknown(b, {"lo", "hi"}, "bounds");
    read_to(b, "lo", c.bound_lo);
    read_to(b, "hi", c.bound_hi);
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    reject_unknown(m,
                   {"field_modes", "kappa_min", "kappa_max", "r_min", "r_max",
                    "b_min", "b_max"},
                   "model");
    read_to(m, "field_modes", c.model.field_modes);
    read_to(m, "kappa_min", c.model.kappa_min);
    read_to(m, "kappa_max", c.model.kappa_max);
    read_to(m, "r_min", c.model.r_min);
    read_to(m, "r_max", c.model.r_max);
    read_to(m, "b_min", c.model.b_min);
    read_to(m, "b_max", c.model.b_max);
  }
  if (j.contains("risk")) {
    const auto& r = j.at("risk");
    reject_unknown(r, {"kind", "beta", "eps", "c"}, "risk");
    if (r.contains("kind"))
      c.risk.kind = risk_kind_from(r.at("kind").get<std::string>());
    read_to(r, "beta", c.risk.beta);
    read_to(r, "eps", c.risk.eps);
    read_to(r, "c", c.risk.c);
  }
  if (j.contains("obstacle_data")) {
    const auto& o = j.at("obstacle_data");
    reject_unknown(o, {"psi_const", "u_d_amplitude"}, "obstacle_data");
    read_to(o, "psi_const", c.psi_const);
    read_to(o, "u_d_amplitude", c.u_d_amplitude);
  }
  if (j.contains("study")) {
    const auto& s = j.at("study");
    reject_unknown(s,
                   {"schedule", "reps", "seed", "n_ref", "ref_multistart",
                    "eps_rule", "common_random_numbers"},
                   "study");
    read_to(s, "schedule", c.study.schedule);
    read_to(s, "reps", c.study.reps);
    read_to(s, "seed", c.study.seed);
    read_to(s, "n_ref", c.study.n_ref);
    read_to(s, "ref_multistart", c.study.ref_multistart);
    read_to(s, "common_random_numbers", c.study.common_random_numbers);
    if (s.contains("eps_rule")) {
      const auto& rule = s.at("eps_rule");
      if (rule.is_string()) {
        const auto name = rule.get<std::string>();
        if (name == "none") c.study.eps_rule = EpsRule::None;
        else if (name == "inv_sqrt") c.study.eps_rule = EpsRule::InvSqrt;
        else parse_fail("unknown eps_rule '" + name + "'");
      } else if (rule.is_number()) {
        c.study.eps_rule = EpsRule::Fixed;
        c.study.eps_fixed = rule.get<double>();
      } else {
        parse_fail("eps_rule must be a string or a number");
      }
    }
  }
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    reject_unknown(o,
                   {"max_iters", "grad_tol", "armijo_c1", "backtrack",
                    "multistart", "r_n", "eps_inner_rel", "threads",
                    "start_seed"},
                   "optimizer");
    auto& opt = c.study.optimizer;
    read_to(o, "max_iters", opt.max_iters);
    read_to(o, "grad_tol", opt.grad_tol);
    read_to(o, "armijo_c1", opt.armijo_c1);
    read_to(o, "backtrack", opt.backtrack);
    read_to(o, "multistart", opt.multistart);
    read_to(o, "r_n", opt.r_n);
    read_to(o, "eps_inner_rel", opt.eps_inner_rel);
    read_to(o, "threads", opt.threads);
    read_to(o, "start_seed", opt.start_seed);
  }
  if (j.contains("acceptance")) {
    const auto& a = j.at("acceptance");
    reject_unknown(a, {"gap_factor_min", "max_inversions"}, "acceptance");
    read_to(a, "gap_factor_min", c.acceptance.gap_factor_min);
    read_to(a, "max_inversions", c.acceptance.max_inversions);
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    reject_unknown(o, {"csv", "summary"}, "output");
    read_to(o, "csv", c.csv_path);
    read_to(o, "summary", c.summary_path);
  }

  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    parse_fail(std::string("invalid JSON: ") + e.what());
  }
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  json j;
  j["problem"] =
      problem == ProblemKind::SemilinearTracking ? "semilinear" : "obstacle";
  j["mesh_nodes"] = mesh_nodes;
  j["alpha"] = alpha;
  j["bounds"] = {{"lo", bound_lo}, {"hi", bound_hi}};
  j["model"] = {{"field_modes", model.field_modes},
                {"kappa_min", model.kappa_min},
                {"kappa_max", model.kappa_max},
                {"r_min", model.r_min},
                {"r_max", model.r_max},
                {"b_min", model.b_min},
                {"b_max", model.b_max}};
  json r;
  r["kind"] = risk_kind_name(risk.kind);
  r["beta"] = risk.beta;
  r["eps"] = risk.eps;
  r["c"] = risk.c;
  j["risk"] = r;
  if (problem == ProblemKind::ObstacleTracking) {
    j["obstacle_data"] = {{"psi_const", psi_const},
                          {"u_d_amplitude", u_d_amplitude}};
  }
  json s;
  s["schedule"] = study.schedule;
  s["reps"] = study.reps;
  s["seed"] = study.seed;
  s["n_ref"] = study.n_ref;
  s["ref_multistart"] = study.ref_multistart;
  s["common_random_numbers"] = study.common_random_numbers;
  switch (study.eps_rule) {
    case EpsRule::None: s["eps_rule"] = "none"; break;
    case EpsRule::InvSqrt: s["eps_rule"] = "inv_sqrt"; break;
    case EpsRule::Fixed: s["eps_rule"] = study.eps_fixed; break;
  }
  j["study"] = s;
  const auto& opt = study.optimizer;
  j["optimizer"] = {{"max_iters", opt.max_iters},
                    {"grad_tol", opt.grad_tol},
                    {"armijo_c1", opt.armijo_c1},
                    {"backtrack", opt.backtrack},
                    {"multistart", opt.multistart},
                    {"r_n", opt.r_n},
                    {"eps_inner_rel", opt.eps_inner_rel},
                    {"threads", opt.threads},
                    {"start_seed", opt.start_seed}};
  j["acceptance"] = {{"gap_factor_min", acceptance.gap_factor_min},
                     {"max_inversions", acceptance.max_inversions}};
  j["output"] = {{"csv", csv_path}, {"summary", summary_path}};
  return j;
}

std::string ExperimentConfig::canonical_dump() const { return to_json().dump(2); }

std::string ExperimentConfig::config_hash() const {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_dump())));
  return buf;
}

ProblemSpec ExperimentConfig::build_problem() const {
  ProblemSpec spec;
  spec.kind = problem;
  spec.mesh = Mesh::uniform(mesh_nodes);
  spec.model = model;
  spec.alpha = alpha;
  spec.risk = risk;
  spec.lo.assign(mesh_nodes, bound_lo);
  spec.hi.assign(mesh_nodes, bound_hi);
  if (problem == ProblemKind::ObstacleTracking) {
    spec.psi.assign(mesh_nodes, psi_const);
    spec.u_d.resize(mesh_nodes);
    for (int i = 0; i < mesh_nodes; ++i) {
      spec.u_d[i] =
          u_d_amplitude * std::sin(std::numbers::pi * spec.mesh.nodes[i]);
    }
  }
  spec.finalize();
  return spec;
}

void ExperimentConfig::validate() const {
  if (mesh_nodes < 3) fail(ErrorCode::InvalidSpec, "mesh_nodes must be >= 3");
  if (problem == ProblemKind::ObstacleTracking && psi_const > 0.0) {
    fail(ErrorCode::InvalidSpec, "psi_const must be <= 0");
  }
  build_problem();          // runs every module-level validation
  if (!study.schedule.empty()) study.validate();
}

std::uint64_t fnv1a64(const std::string& text) noexcept {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace rave
