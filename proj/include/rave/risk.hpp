#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rave/errors.hpp"

namespace rave {

// Empirical distribution of a scalar sample: sorted order statistics with
// uniform weights 1/n. Construction sorts, so two samples that are
// permutations of each other produce bitwise-identical objects; every risk
// functional below therefore evaluates law-invariantly by construction.
class EmpiricalDist {
 public:
  explicit EmpiricalDist(std::vector<double> sample);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double min() const noexcept { return values_.front(); }
  double max() const noexcept { return values_.back(); }

 private:
  std::vector<double> values_;
};

EmpiricalDist make_empirical(std::span<const double> sample);

enum class RiskKind {
  Expectation,
  MeanSemiDev,
  AVaR,
  SmoothedAVaR,
  EpiAVaR,
};

const char* risk_kind_name(RiskKind kind) noexcept;

// Tagged choice of risk functional. beta is the confidence level, eps the
// regularization/smoothing parameter, c the semideviation weight; only the
// fields relevant to `kind` are read.
struct RiskSpec {
  RiskKind kind = RiskKind::Expectation;
  double beta = 0.0;
  double eps = 0.0;
  double c = 0.0;

  static RiskSpec expectation() { return {RiskKind::Expectation, 0, 0, 0}; }
  static RiskSpec mean_semidev(double c) {
    return {RiskKind::MeanSemiDev, 0, 0, c};
  }
  static RiskSpec avar(double beta) { return {RiskKind::AVaR, beta, 0, 0}; }
  static RiskSpec smoothed_avar(double beta, double eps) {
    return {RiskKind::SmoothedAVaR, beta, eps, 0};
  }
  static RiskSpec epi_avar(double beta, double eps) {
    return {RiskKind::EpiAVaR, beta, eps, 0};
  }

  void validate() const;
  std::string describe() const;
};

// Compensated (Kahan) sum in the given order. All risk evaluations sum in
// ascending value order for cross-run determinism.
double kahan_sum(std::span<const double> xs) noexcept;

// Empirical quantile: the j-th order statistic with j the smallest integer
// such that q <= j/n. Requires 0 < q <= 1.
double quantile(const EmpiricalDist& d, double q);

double expectation(const EmpiricalDist& d);

// Average value-at-risk at level beta in [0,1):
//   AVaR(X) = inf_t { t + E[(X - t)_+] / (1 - beta) }.
// The minimizer is taken at the beta order-statistic quantile; beta = 0
// reduces to the expectation.
double avar(const EmpiricalDist& d, double beta);

// E[X] + c * E[(X - E[X])_+] with weight c in [0,1].
double mean_semidev(const EmpiricalDist& d, double c);

// Smoothed plus function <x>_eps = eps * ln(1 + exp(x/eps)), evaluated
// overflow-safely. Monotone increasing and convex in x, and monotone
// non-decreasing in eps.
double smoothed_plus(double x, double eps);

// Logistic sigma(u) = 1/(1+exp(-u)), the derivative of <.>_1.
double logistic(double u) noexcept;

// Smoothed AVaR: inf_t { t + E[<X - t>_eps] / (1 - beta) }, solved by
// safeguarded Newton on the strictly convex scalar reduction. beta = 0
// gives exactly the expectation (the infimum is approached as t -> -inf).
double smoothed_avar(const EmpiricalDist& d, double beta, double eps);

// Scenario-wise regret of epi-regularized AVaR:
//   g_eps(r) = inf_y { (r - y)_+ / (1 - beta) + y^2/(2 eps) + y }.
// Closed piecewise-quadratic form; gated by a grid-oracle equivalence test.
double epi_regret(double r, double beta, double eps);
double epi_regret_derivative(double r, double beta, double eps);

// Epi-regularized AVaR: inf over mean-square perturbations Y of
// AVaR(X - Y) + eps * Phi(Y / eps) with Phi(X) = E[X^2]/2 + E[X]. For an
// empirical distribution this separates per scenario:
//   inf_t { t + (1/n) sum_i g_eps(x_i - t) }.
double epi_avar(const EmpiricalDist& d, double beta, double eps);

double eval_risk(const RiskSpec& spec, const EmpiricalDist& d);

// Evaluates the risk of the (unsorted) sample and returns one weight per
// input entry such that the weights form a subgradient of the risk as a
// function of the sample vector: d risk / d x_i = w_i. Weights sum to 1.
std::vector<double> risk_gradient_weights(const RiskSpec& spec,
                                          std::span<const double> values);

// Counts of randomized-axiom violations beyond 1e-9 over the trial budget.
struct AxiomReport {
  std::int64_t convexity_violations = 0;
  std::int64_t monotonicity_violations = 0;
  std::int64_t translation_violations = 0;
  std::int64_t homogeneity_violations = 0;
  double max_violation = 0.0;
  std::int64_t trials = 0;

  bool coherent() const noexcept {
    return convexity_violations == 0 && monotonicity_violations == 0 &&
           translation_violations == 0 && homogeneity_violations == 0;
  }
  bool convex_risk_measure() const noexcept {
    return convexity_violations == 0 && monotonicity_violations == 0 &&
           translation_violations == 0;
  }
};

// Randomized checks of convexity, monotonicity, translation equivariance and
// positive homogeneity on paired samples. Homogeneity is expected to fail
// for the smoothed/epi-regularized variants; failures are reported, never
// thrown.
AxiomReport verify_axioms(const RiskSpec& spec, std::int64_t trials,
                          std::uint64_t seed);

}  // namespace rave
