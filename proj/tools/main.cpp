#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rave/config.hpp"
#include "rave/risk.hpp"
#include "rave/rng.hpp"
#include "rave/saa.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitParse = 2;
constexpr int kExitInvalidSpec = 3;
constexpr int kExitSolver = 4;

int exit_code_for(const rave::Error& e) {
  switch (e.code()) {
    case rave::ErrorCode::ConfigParse:
      return kExitParse;
    case rave::ErrorCode::NoConvergence:
    case rave::ErrorCode::SingularSystem:
    case rave::ErrorCode::NoDescent:
      return kExitSolver;
    default:
      return kExitInvalidSpec;
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("RAVE_SEED");
  if (!s || !*s) return std::nullopt;
  return std::strtoull(s, nullptr, 10);
}

rave::RiskSpec risk_from_flags(const std::string& kind, double beta,
                               double eps, double c) {
  rave::RiskSpec spec;
  if (kind == "expectation") spec = rave::RiskSpec::expectation();
  else if (kind == "mean_semidev") spec = rave::RiskSpec::mean_semidev(c);
  else if (kind == "avar") spec = rave::RiskSpec::avar(beta);
  else if (kind == "smoothed_avar") spec = rave::RiskSpec::smoothed_avar(beta, eps);
  else if (kind == "epi_avar") spec = rave::RiskSpec::epi_avar(beta, eps);
  else rave::fail(rave::ErrorCode::InvalidSpec, "unknown risk kind '" + kind + "'");
  spec.validate();
  return spec;
}

std::vector<double> read_sample_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) rave::fail(rave::ErrorCode::ConfigParse, "cannot open '" + path + "'");
  std::vector<double> values;
  std::string token;
  while (std::getline(in, token)) {
    std::size_t pos = 0;
    while (pos < token.size()) {
      std::size_t comma = token.find(',', pos);
      if (comma == std::string::npos) comma = token.size();
      const std::string field = token.substr(pos, comma - pos);
      pos = comma + 1;
      const auto begin = field.find_first_not_of(" \t\r");
      if (begin == std::string::npos) continue;
      try {
        values.push_back(std::stod(field));
      } catch (const std::exception&) {
        rave::fail(rave::ErrorCode::ConfigParse,
                   "bad number '" + field + "' in '" + path + "'");
      }
    }
  }
  return values;
}

int cmd_eval_risk(const std::string& kind, double beta, double eps, double c,
                  const std::string& path) {
  const auto spec = risk_from_flags(kind, beta, eps, c);
  const auto values = read_sample_file(path);
  const double out = rave::eval_risk(spec, rave::make_empirical(values));
  std::printf("%.12g\n", out);
  return kExitOk;
}

int cmd_verify_axioms(const std::string& kind, double beta, double eps,
                      double c, std::int64_t trials, std::uint64_t seed) {
  const auto spec = risk_from_flags(kind, beta, eps, c);
  const auto report = rave::verify_axioms(spec, trials, seed);
  std::printf("risk: %s\n", spec.describe().c_str());
  std::printf("trials: %lld\n", static_cast<long long>(report.trials));
  std::printf("convexity_violations: %lld\n",
              static_cast<long long>(report.convexity_violations));
  std::printf("monotonicity_violations: %lld\n",
              static_cast<long long>(report.monotonicity_violations));
  std::printf("translation_violations: %lld\n",
              static_cast<long long>(report.translation_violations));
  std::printf("homogeneity_violations: %lld\n",
              static_cast<long long>(report.homogeneity_violations));
  std::printf("max_violation: %.6g\n", report.max_violation);

  const bool smoothed_kind = spec.kind == rave::RiskKind::SmoothedAVaR ||
                             spec.kind == rave::RiskKind::EpiAVaR;
  const bool ok = smoothed_kind ? report.convex_risk_measure() : report.coherent();
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_check_bounds(std::int64_t trials, std::uint64_t seed, int max_n,
                     std::vector<double> betas, std::vector<double> epss,
                     const std::string& out_path, bool self_test) {
  using namespace rave;
  for (double b : betas) {
    if (!(b >= 0.0 && b < 1.0)) fail(ErrorCode::BetaOutOfRange, "bad --beta");
  }
  for (double e : epss) {
    if (!(e > 0.0)) fail(ErrorCode::NonpositiveEpsilon, "bad --eps");
  }
  if (betas.empty()) betas = {0.5, 0.9, 0.95};
  if (epss.empty()) epss = {1.0, 0.1, 0.01};

  std::ofstream csv;
  if (!out_path.empty()) {
    csv.open(out_path);
    csv << "trial,n,beta,eps,exact,smoothed,epi,smooth_excess,epi_excess\n";
  }

  const double width_scale = self_test ? 0.5 : 1.0;
  std::int64_t violations = 0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    const auto id = static_cast<std::uint64_t>(trial);
    // trial 0 pins a single-atom sample, which attains the smoothed bound
    const std::size_t n =
        trial == 0 ? 1 : 1 + rng::counter_hash(seed, id, 0) % max_n;
    std::vector<double> sample(n);
    for (std::size_t i = 0; i < n; ++i)
      sample[i] = rng::uniform(seed, id, 10 + i, -5.0, 5.0);
    const auto d = make_empirical(sample);

    for (double beta : betas) {
      for (double eps : epss) {
        const double exact = avar(d, beta);
        const double sm = smoothed_avar(d, beta, eps);
        const double ep = epi_avar(d, beta, eps);
        const double sm_width = width_scale * std::log(2.0) * eps / (1.0 - beta);
        const double ep_width = width_scale * eps * beta / (2.0 * (1.0 - beta));
        const double sm_excess =
            std::max(exact - sm, sm - exact - sm_width);
        const double ep_excess =
            std::max(ep - exact, exact - ep - ep_width);
        if (csv.is_open()) {
          char buf[256];
          std::snprintf(buf, sizeof buf,
                        "%lld,%zu,%g,%g,%.17g,%.17g,%.17g,%.3e,%.3e\n",
                        static_cast<long long>(trial), n, beta, eps, exact, sm,
                        ep, sm_excess, ep_excess);
          csv << buf;
        }
        if (sm_excess > 1e-8 || ep_excess > 1e-8) {
          ++violations;
          std::fprintf(stderr,
                       "violation: beta=%g eps=%g exact=%.17g smoothed=%.17g "
                       "epi=%.17g sample=",
                       beta, eps, exact, sm, ep);
          for (double v : sample) std::fprintf(stderr, "%.17g,", v);
          std::fprintf(stderr, "\n");
        }
      }
    }
  }
  std::printf("trials: %lld, violations: %lld\n",
              static_cast<long long>(trials),
              static_cast<long long>(violations));
  return violations == 0 ? kExitOk : kExitCheckFailed;
}

int cmd_run_study(const std::string& config_path,
                  std::optional<std::uint64_t> seed_flag,
                  std::optional<int> threads_flag, bool no_timing,
                  std::string csv_override, std::string summary_override) {
  using namespace rave;
  ExperimentConfig config = ExperimentConfig::from_file(config_path);
  if (config.study.schedule.empty()) {
    fail(ErrorCode::InvalidSpec, "config has no study schedule");
  }
  if (const auto env = env_seed()) config.study.seed = *env;
  if (seed_flag) config.study.seed = *seed_flag;
  if (threads_flag) config.study.optimizer.threads = *threads_flag;
  if (!csv_override.empty()) config.csv_path = csv_override;
  if (!summary_override.empty()) config.summary_path = summary_override;

  const ProblemSpec spec = config.build_problem();
  const std::string hash = config.config_hash();

  std::ofstream csv(config.csv_path);
  if (!csv) fail(ErrorCode::ConfigParse, "cannot write '" + config.csv_path + "'");
  csv << "n,rep,seed,value,gap,dist_to_ref,runtime_ms\n";
  csv.flush();

  const auto table = run_consistency_study(
      spec, config.study, [&](const StudyRow& row) {
        char buf[192];
        std::snprintf(buf, sizeof buf, "%lld,%d,%llu,%.17g,%.17g,%.17g,%.3f\n",
                      static_cast<long long>(row.n), row.rep,
                      static_cast<unsigned long long>(row.seed), row.value,
                      row.gap, row.dist_to_ref,
                      no_timing ? 0.0 : row.runtime_ms);
        csv << buf;
        csv.flush();  // partial tables survive interruption
      });

  const auto verdict = judge_study(table, config.acceptance);

  nlohmann::json summary;
  summary["config_hash"] = hash;
  summary["config_path"] = config_path;
  summary["csv"] = config.csv_path;
  summary["seed"] = config.study.seed;
  summary["reference"] = {{"n_ref", table.n_ref},
                          {"seed", table.ref_seed},
                          {"value", table.ref_value},
                          {"r_ref", table.r_ref},
                          {"set_size", table.ref_set.size()}};
  nlohmann::json per_n = nlohmann::json::array();
  for (std::int64_t n : table.schedule()) {
    per_n.push_back({{"n", n},
                     {"median_gap", table.median_gap(n)},
                     {"iqr_gap", table.iqr_gap(n)},
                     {"median_dist", table.median_dist(n)}});
  }
  summary["per_n"] = per_n;
  summary["verdict"] = {{"gap_factor", verdict.gap_factor},
                        {"gap_factor_ok", verdict.gap_factor_ok},
                        {"dist_inversions", verdict.dist_inversions},
                        {"dist_monotone_ok", verdict.dist_monotone_ok},
                        {"gap_inversions", verdict.gap_inversions},
                        {"sandwich_ok", verdict.sandwich_ok},
                        {"sandwich_violation", verdict.sandwich_violation},
                        {"variant_anchor_ok", verdict.variant_anchor_ok},
                        {"variant_combined_tol", verdict.variant_combined_tol}};
  summary["pass"] = verdict.pass;

  std::ofstream sum(config.summary_path);
  if (!sum) fail(ErrorCode::ConfigParse, "cannot write '" + config.summary_path + "'");
  sum << summary.dump(2) << "\n";

  std::printf("study %s: gap factor %.3g, dist inversions %d -> %s\n",
              hash.c_str(), verdict.gap_factor, verdict.dist_inversions,
              verdict.pass ? "PASS" : "FAIL");
  return verdict.pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"risk-averse SAA toolkit"};
  app.require_subcommand(1);

  // eval-risk
  std::string er_kind, er_in;
  double er_beta = 0.0, er_eps = 0.0, er_c = 0.0;
  auto* eval = app.add_subcommand("eval-risk", "evaluate a risk functional on a sample file");
  eval->add_option("--kind", er_kind, "risk kind")->required();
  eval->add_option("--beta", er_beta, "confidence level");
  eval->add_option("--eps", er_eps, "smoothing / regularization parameter");
  eval->add_option("--c", er_c, "semideviation weight");
  eval->add_option("--in", er_in, "sample file, one value per line")->required();

  // verify-axioms
  std::string va_kind;
  double va_beta = 0.5, va_eps = 0.1, va_c = 0.5;
  std::int64_t va_trials = 1000;
  std::uint64_t va_seed = env_seed().value_or(42);
  auto* axioms = app.add_subcommand("verify-axioms", "randomized risk-measure axiom checks");
  axioms->add_option("--kind", va_kind, "risk kind")->required();
  axioms->add_option("--beta", va_beta, "confidence level");
  axioms->add_option("--eps", va_eps, "smoothing parameter");
  axioms->add_option("--c", va_c, "semideviation weight");
  axioms->add_option("--trials", va_trials, "trial count");
  axioms->add_option("--seed", va_seed, "rng seed");

  // check-bounds
  std::int64_t cb_trials = 1000;
  std::uint64_t cb_seed = env_seed().value_or(7);
  int cb_max_n = 64;
  std::vector<double> cb_betas, cb_epss;
  std::string cb_out;
  bool cb_self_test = false;
  auto* bounds = app.add_subcommand("check-bounds", "randomized sandwich-bound checks");
  bounds->add_option("--trials", cb_trials, "trial count");
  bounds->add_option("--seed", cb_seed, "rng seed");
  bounds->add_option("--max-n", cb_max_n, "max sample size");
  bounds->add_option("--beta", cb_betas, "confidence levels");
  bounds->add_option("--eps", cb_epss, "smoothing parameters");
  bounds->add_option("--out", cb_out, "per-trial csv path");
  bounds->add_flag("--self-test", cb_self_test,
                   "shrink the bounds to demonstrate violation detection");

  // run-study
  std::string rs_config, rs_csv, rs_summary;
  std::optional<std::uint64_t> rs_seed;
  std::optional<int> rs_threads;
  bool rs_no_timing = false;
  auto* study = app.add_subcommand("run-study", "run a consistency study from a config");
  study->add_option("--config", rs_config, "experiment config (json)")->required();
  study->add_option("--seed", rs_seed, "override the config seed");
  study->add_option("--threads", rs_threads, "worker cap (does not affect results)");
  study->add_flag("--no-timing", rs_no_timing, "write runtime_ms as 0 for byte-stable output");
  study->add_option("--csv", rs_csv, "override the csv output path");
  study->add_option("--summary", rs_summary, "override the summary output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval->parsed()) {
      return cmd_eval_risk(er_kind, er_beta, er_eps, er_c, er_in);
    }
    if (axioms->parsed()) {
      return cmd_verify_axioms(va_kind, va_beta, va_eps, va_c, va_trials, va_seed);
    }
    if (bounds->parsed()) {
      return cmd_check_bounds(cb_trials, cb_seed, cb_max_n, cb_betas, cb_epss,
                              cb_out, cb_self_test);
    }
    if (study->parsed()) {
      return cmd_run_study(rs_config, rs_seed, rs_threads, rs_no_timing,
                           rs_csv, rs_summary);
    }
  } catch (const rave::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
  return kExitOk;
}
