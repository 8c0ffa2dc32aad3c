#include "rave/risk.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "rave/rng.hpp"

namespace rave {

namespace {

constexpr double kDerivTol = 1e-10;
constexpr int kMaxScalarIters = 200;
constexpr double kAxiomTol = 1e-9;

// Safeguarded Newton on the derivative of a convex scalar function.
// Requires deriv(lo) <= 0 <= deriv(hi); keeps the bracket and falls back to
// bisection whenever the Newton step leaves it.
double minimize_convex_scalar(const std::function<double(double)>& deriv,
                              const std::function<double(double)>& curvature,
                              double lo, double hi) {
  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < kMaxScalarIters; ++iter) {
    const double g = deriv(t);
    if (std::abs(g) <= kDerivTol) return t;
    if (g > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    const double h = curvature(t);
    double next = (h > 0.0) ? t - g / h : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    t = next;
  }
  if (std::abs(deriv(t)) > kDerivTol) {
    fail(ErrorCode::NoConvergence,
         "scalar minimization did not reach derivative tolerance");
  }
  return t;
}

struct ScalarMin {
  double t;
  double value;
};

ScalarMin smoothed_avar_solve(const EmpiricalDist& d, double beta,
                              double eps) {
  const auto& v = d.values();
  const double n = static_cast<double>(v.size());
  const double q = 1.0 / (1.0 - beta);

  const double margin = eps * (40.0 + std::abs(std::log(beta / (1.0 - beta))));
  const double lo = d.min() - margin;
  const double hi = d.max() + margin;

  auto deriv = [&](double t) {
    std::vector<double> terms(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      terms[i] = logistic((v[i] - t) / eps);
    return 1.0 - (q / n) * kahan_sum(terms);
  };
  auto curvature = [&](double t) {
    double s = 0.0;
    for (double vi : v) {
      const double sg = logistic((vi - t) / eps);
      s += sg * (1.0 - sg);
    }
    return q * s / (n * eps);
  };

  const double t = minimize_convex_scalar(deriv, curvature, lo, hi);
  std::vector<double> terms(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    terms[i] = smoothed_plus(v[i] - t, eps);
  return {t, t + (q / n) * kahan_sum(terms)};
}

ScalarMin epi_avar_solve(const EmpiricalDist& d, double beta, double eps) {
  const auto& v = d.values();
  const double n = static_cast<double>(v.size());
  const double q = 1.0 / (1.0 - beta);

  const double lo = d.min() - eps * (q - 1.0) - 1.0;
  const double hi = d.max() + eps + 1.0;

  auto deriv = [&](double t) {
    std::vector<double> terms(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      terms[i] = epi_regret_derivative(v[i] - t, beta, eps);
    return 1.0 - kahan_sum(terms) / n;
  };
  auto curvature = [&](double t) {
    double count = 0.0;
    for (double vi : v) {
      const double r = vi - t;
      if (r > -eps && r < eps * (q - 1.0)) count += 1.0;
    }
    return count / (n * eps);
  };

  const double t = minimize_convex_scalar(deriv, curvature, lo, hi);
  std::vector<double> terms(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    terms[i] = epi_regret(v[i] - t, beta, eps);
  return {t, t + kahan_sum(terms) / n};
}

void check_beta(double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    fail(ErrorCode::BetaOutOfRange, "confidence level must lie in [0,1)");
  }
}

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    fail(ErrorCode::NonpositiveEpsilon, "smoothing parameter must be > 0");
  }
}

}  // namespace

EmpiricalDist::EmpiricalDist(std::vector<double> sample)
    : values_(std::move(sample)) {
  if (values_.empty()) {
    fail(ErrorCode::EmptySample, "empirical distribution needs >= 1 value");
  }
  for (double x : values_) {
    if (!std::isfinite(x)) {
      fail(ErrorCode::NonFiniteValue, "sample contains a non-finite value");
    }
  }
  std::sort(values_.begin(), values_.end());
}

EmpiricalDist make_empirical(std::span<const double> sample) {
  return EmpiricalDist(std::vector<double>(sample.begin(), sample.end()));
}

const char* risk_kind_name(RiskKind kind) noexcept {
  switch (kind) {
    case RiskKind::Expectation: return "expectation";
    case RiskKind::MeanSemiDev: return "mean_semidev";
    case RiskKind::AVaR: return "avar";
    case RiskKind::SmoothedAVaR: return "smoothed_avar";
    case RiskKind::EpiAVaR: return "epi_avar";
  }
  return "unknown";
}

void RiskSpec::validate() const {
  switch (kind) {
    case RiskKind::Expectation:
      break;
    case RiskKind::MeanSemiDev:
      if (!(c >= 0.0 && c <= 1.0)) {
        fail(ErrorCode::WeightOutOfRange, "semideviation weight outside [0,1]");
      }
      break;
    case RiskKind::AVaR:
      check_beta(beta);
      break;
    case RiskKind::SmoothedAVaR:
    case RiskKind::EpiAVaR:
      check_beta(beta);
      check_eps(eps);
      break;
  }
}

std::string RiskSpec::describe() const {
  std::string s = risk_kind_name(kind);
  switch (kind) {
    case RiskKind::Expectation: break;
    case RiskKind::MeanSemiDev: s += "(c=" + std::to_string(c) + ")"; break;
    case RiskKind::AVaR: s += "(beta=" + std::to_string(beta) + ")"; break;
    case RiskKind::SmoothedAVaR:
    case RiskKind::EpiAVaR:
      s += "(beta=" + std::to_string(beta) + ",eps=" + std::to_string(eps) + ")";
      break;
  }
  return s;
}

double kahan_sum(std::span<const double> xs) noexcept {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double quantile(const EmpiricalDist& d, double q) {
  if (!(q > 0.0 && q <= 1.0)) {
    fail(ErrorCode::QuantileOutOfRange, "quantile level must lie in (0,1]");
  }
  const std::size_t n = d.size();
  // smallest j with q <= j/n
  auto j = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  j = std::max<std::size_t>(1, std::min(j, n));
  return d.values()[j - 1];
}

double expectation(const EmpiricalDist& d) {
  return kahan_sum(d.values()) / static_cast<double>(d.size());
}

double avar(const EmpiricalDist& d, double beta) {
  check_beta(beta);
  if (beta == 0.0) return expectation(d);
  const double t = quantile(d, beta);
  const auto& v = d.values();
  const double n = static_cast<double>(v.size());
  std::vector<double> tail;
  tail.reserve(v.size());
  for (double vi : v) tail.push_back(std::max(0.0, vi - t));
  return t + kahan_sum(tail) / ((1.0 - beta) * n);
}

double mean_semidev(const EmpiricalDist& d, double c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    fail(ErrorCode::WeightOutOfRange, "semideviation weight outside [0,1]");
  }
  const double mean = expectation(d);
  const auto& v = d.values();
  std::vector<double> dev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    dev[i] = std::max(0.0, v[i] - mean);
  return mean + c * kahan_sum(dev) / static_cast<double>(v.size());
}

double smoothed_plus(double x, double eps) {
  check_eps(eps);
  if (x >= 0.0) return x + eps * std::log1p(std::exp(-x / eps));
  return eps * std::log1p(std::exp(x / eps));
}

double logistic(double u) noexcept {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

double smoothed_avar(const EmpiricalDist& d, double beta, double eps) {
  check_beta(beta);
  check_eps(eps);
  // At beta = 0 the scalar reduction decreases monotonically to E[X] as
  // t -> -inf; the infimum equals the expectation.
  if (beta == 0.0) return expectation(d);
  return smoothed_avar_solve(d, beta, eps).value;
}

double epi_regret(double r, double beta, double eps) {
  const double q = 1.0 / (1.0 - beta);
  const double knee = eps * (q - 1.0);
  if (r <= -eps) return -0.5 * eps;
  if (r >= knee) return q * r - 0.5 * eps * (q - 1.0) * (q - 1.0);
  return 0.5 * r * r / eps + r;
}

double epi_regret_derivative(double r, double beta, double eps) {
  const double q = 1.0 / (1.0 - beta);
  const double knee = eps * (q - 1.0);
  if (r <= -eps) return 0.0;
  if (r >= knee) return q;
  return r / eps + 1.0;
}

double epi_avar(const EmpiricalDist& d, double beta, double eps) {
  check_beta(beta);
  check_eps(eps);
  // beta = 0: the regret reduces to g(r) = r for r >= 0, so the reduction is
  // constant at E[X] for t <= min(X); the infimum is the expectation.
  if (beta == 0.0) return expectation(d);
  return epi_avar_solve(d, beta, eps).value;
}

double eval_risk(const RiskSpec& spec, const EmpiricalDist& d) {
  spec.validate();
  switch (spec.kind) {
    case RiskKind::Expectation: return expectation(d);
    case RiskKind::MeanSemiDev: return mean_semidev(d, spec.c);
    case RiskKind::AVaR: return avar(d, spec.beta);
    case RiskKind::SmoothedAVaR: return smoothed_avar(d, spec.beta, spec.eps);
    case RiskKind::EpiAVaR: return epi_avar(d, spec.beta, spec.eps);
  }
  fail(ErrorCode::InvalidSpec, "unhandled risk kind");
}

std::vector<double> risk_gradient_weights(const RiskSpec& spec,
                                          std::span<const double> values) {
  spec.validate();
  const std::size_t n = values.size();
  const double nd = static_cast<double>(n);
  EmpiricalDist d = make_empirical(values);
  std::vector<double> w(n, 1.0 / nd);

  switch (spec.kind) {
    case RiskKind::Expectation:
      break;
    case RiskKind::MeanSemiDev: {
      const double mean = expectation(d);
      double above = 0.0;
      for (double vi : values)
        if (vi > mean) above += 1.0;
      const double p = above / nd;
      for (std::size_t i = 0; i < n; ++i) {
        const double ind = values[i] > mean ? 1.0 : 0.0;
        w[i] = (1.0 + spec.c * (ind - p)) / nd;
      }
      break;
    }
    case RiskKind::AVaR: {
      if (spec.beta == 0.0) break;
      const double q = 1.0 / (1.0 - spec.beta);
      const double t = quantile(d, spec.beta);
      std::size_t n_above = 0, n_at = 0;
      for (double vi : values) {
        if (vi > t) ++n_above;
        else if (vi == t) ++n_at;
      }
      // Subgradient selection: full tail weight above the quantile, the
      // remaining probability mass split over the atoms at the quantile.
      const double at_weight =
          (1.0 - q * static_cast<double>(n_above) / nd) /
          static_cast<double>(n_at);
      for (std::size_t i = 0; i < n; ++i) {
        if (values[i] > t) w[i] = q / nd;
        else if (values[i] == t) w[i] = at_weight;
        else w[i] = 0.0;
      }
      break;
    }
    case RiskKind::SmoothedAVaR: {
      if (spec.beta == 0.0) break;
      const double q = 1.0 / (1.0 - spec.beta);
      const ScalarMin m = smoothed_avar_solve(d, spec.beta, spec.eps);
      for (std::size_t i = 0; i < n; ++i)
        w[i] = q * logistic((values[i] - m.t) / spec.eps) / nd;
      break;
    }
    case RiskKind::EpiAVaR: {
      if (spec.beta == 0.0) break;
      const ScalarMin m = epi_avar_solve(d, spec.beta, spec.eps);
      for (std::size_t i = 0; i < n; ++i)
        w[i] = epi_regret_derivative(values[i] - m.t, spec.beta, spec.eps) / nd;
      break;
    }
  }
  return w;
}

AxiomReport verify_axioms(const RiskSpec& spec, std::int64_t trials,
                          std::uint64_t seed) {
  spec.validate();
  if (trials < 1) fail(ErrorCode::InvalidSpec, "trials must be >= 1");

  auto rho = [&](const std::vector<double>& xs) {
    return eval_risk(spec, EmpiricalDist(xs));
  };

  AxiomReport report;
  report.trials = trials;
  auto record = [&](std::int64_t& counter, double excess) {
    if (excess > kAxiomTol) {
      ++counter;
      report.max_violation = std::max(report.max_violation, excess);
    }
  };

  for (std::int64_t k = 0; k < trials; ++k) {
    const auto kk = static_cast<std::uint64_t>(k);
    const std::size_t n = 2 + rng::counter_hash(seed, kk, 0) % 23;

    std::vector<double> x(n), y(n), z(n), shifted(n), scaled_x(n), upper(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng::uniform(seed, kk, 100 + i, -5.0, 5.0);
      y[i] = rng::uniform(seed, kk, 200 + i, -5.0, 5.0);
      upper[i] = x[i] + rng::uniform(seed, kk, 300 + i, 0.0, 2.0);
    }
    const double lambda = rng::uniform(seed, kk, 1, 0.01, 0.99);
    const double shift = rng::uniform(seed, kk, 2, -3.0, 3.0);
    double gamma = std::exp(rng::uniform(seed, kk, 3, std::log(0.2), std::log(5.0)));
    if (std::abs(gamma - 1.0) < 0.05) gamma += 0.2;

    for (std::size_t i = 0; i < n; ++i) {
      z[i] = lambda * x[i] + (1.0 - lambda) * y[i];
      shifted[i] = x[i] + shift;
      scaled_x[i] = gamma * x[i];
    }

    const double rx = rho(x);
    record(report.convexity_violations,
           rho(z) - (lambda * rx + (1.0 - lambda) * rho(y)));
    record(report.monotonicity_violations, rx - rho(upper));
    record(report.translation_violations,
           std::abs(rho(shifted) - (rx + shift)));
    record(report.homogeneity_violations,
           std::abs(rho(scaled_x) - gamma * rx));
  }
  return report;
}

}  // namespace rave
