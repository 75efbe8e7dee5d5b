#include "gbias/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include "gbias/error.hpp"
#include "gbias/rng.hpp"

namespace gbias {
namespace {

std::vector<double> run_paths(const ProcessConfig& cfg) {
  const double sd = std::sqrt(cfg.growth.v);
  const double m = cfg.growth.m;
  std::vector<double> out(cfg.n_paths);
  for (std::size_t path = 0; path < cfg.n_paths; ++path) {
    RandomStream rng(derive_seed(cfg.seed, {path}));
    double x = cfg.x0;
    if (!cfg.epsilon) {
      for (std::size_t t = 0; t < cfg.steps; ++t) x = std::exp(m + sd * rng.normal()) * x;
    } else if (cfg.epsilon->kind == EpsilonLaw::Kind::kConstant) {
      const double eps = cfg.epsilon->mean;
      for (std::size_t t = 0; t < cfg.steps; ++t) x = std::exp(m + sd * rng.normal()) * x + eps;
    } else {
      const double mean = cfg.epsilon->mean;
      for (std::size_t t = 0; t < cfg.steps; ++t) {
        const double r = std::exp(m + sd * rng.normal());
        x = r * x - mean * std::log(rng.uniform());
      }
    }
    out[path] = x;
  }
  return out;
}

}  // namespace

void ProcessConfig::validate() const {
  if (!(x0 > 0.0) || !std::isfinite(x0)) throw DomainError("x0: must be a finite positive value");
  if (steps < 1) throw DomainError("steps: must be >= 1");
  if (n_paths < 1) throw DomainError("n_paths: must be >= 1");
  if (!std::isfinite(growth.m)) throw DomainError("m: must be finite");
  if (!(growth.v > 0.0) || !std::isfinite(growth.v)) throw DomainError("v: must be > 0");
  if (epsilon) {
    if (!(epsilon->mean >= 0.0) || !std::isfinite(epsilon->mean))
      throw DomainError("epsilon: mean must be >= 0");
    if (epsilon->kind == EpsilonLaw::Kind::kExponential && !(epsilon->mean > 0.0))
      throw DomainError("epsilon: exponential law needs a positive mean");
  }
}

std::vector<double> gibrat_simulate(const ProcessConfig& cfg) {
  cfg.validate();
  if (cfg.epsilon) throw DomainError("epsilon: a Gibrat process has no additive term");
  return run_paths(cfg);
}

std::vector<double> kesten_simulate(const ProcessConfig& cfg, const WarningSink& warn) {
  cfg.validate();
  if (!cfg.epsilon) throw DomainError("epsilon: a Kesten process needs an additive law");
  auto emit = [&](const std::string& msg) {
    if (warn)
      warn(msg);
    else
      std::cerr << "warning: " << msg << '\n';
  };
  if (cfg.growth.m >= 0.0) emit("E[log R] = m >= 0: the process has no stationary law");
  if (cfg.epsilon->mean == 0.0) emit("E[eps] = 0: the process reduces to Gibrat growth");
  return run_paths(cfg);
}

double kesten_exponent(double m, double v) {
  if (!(m < 0.0)) throw DomainError("Kesten exponent needs m < 0 (no stationary heavy tail)");
  if (!(v > 0.0)) throw DomainError("Kesten exponent needs v > 0");
  return -2.0 * m / v;
}

std::size_t default_hill_k(std::size_t n) noexcept {
  const auto k = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 2.0 / 3.0)));
  return std::max<std::size_t>(k, 10);
}

TailEstimate hill_tail_index(std::span<const double> values, std::size_t k) {
  const std::size_t n = values.size();
  if (k < 10) throw DomainError("Hill estimator needs k >= 10");
  if (k >= n)
    throw DomainError("Hill estimator needs k < n (k = " + std::to_string(k) +
                      ", n = " + std::to_string(n) + ")");
  for (double x : values)
    if (!(x > 0.0)) throw DataError("Hill estimator needs positive values");

  std::vector<double> top(values.begin(), values.end());
  // Top k + 1 order statistics, largest first.
  std::partial_sort(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k + 1), top.end(),
                    std::greater<>());
  const double log_threshold = std::log(top[k]);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(top[i]) - log_threshold;
  if (!(sum > 0.0)) throw DataError("Hill estimator: top order statistics are all equal");

  TailEstimate est;
  est.index = static_cast<double>(k) / sum;
  est.k_used = k;
  est.std_error = est.index / std::sqrt(static_cast<double>(k));
  return est;
}

}  // namespace gbias
