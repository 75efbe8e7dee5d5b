#include "gbias/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "gbias/error.hpp"
#include "gbias/optimize.hpp"
#include "gbias/rng.hpp"

namespace gbias {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double std_normal_quantile(double q) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

// log(1 + exp(a)) without overflow.
double log1p_exp(double a) {
  return a > 35.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

void require_probability(double q) {
  if (!(q > 0.0 && q < 1.0))
    throw DomainError("probability must lie in (0, 1), got " + std::to_string(q));
}

// log f(x) for x > mu_loc, no validation.
double gpd_log_pdf_unchecked(const GpdParams& p, double log_excess) {
  const double inv_gamma = 1.0 / p.gamma;
  const double log_z = log_excess - std::log(p.kappa);
  return std::log(p.alpha * inv_gamma) - inv_gamma * std::log(p.kappa) +
         (inv_gamma - 1.0) * log_excess - (p.alpha + 1.0) * log1p_exp(log_z * inv_gamma);
}

}  // namespace

void LogNormalParams::validate() const {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || !(sigma > 0.0))
    throw DomainError("log-normal parameters require finite mu and sigma > 0");
}

void GpdParams::validate() const {
  if (!(kappa > 0.0) || !(alpha > 0.0) || !(gamma > 0.0) || !std::isfinite(kappa) ||
      !std::isfinite(alpha) || !std::isfinite(gamma) || !std::isfinite(mu_loc))
    throw DomainError("GPD parameters require kappa, alpha, gamma > 0 and finite mu_loc");
}

double lognormal_pdf(const LogNormalParams& p, double x) {
  p.validate();
  if (!(x > 0.0)) throw DomainError("log-normal density requires x > 0");
  const double z = (std::log(x) - p.mu) / p.sigma;
  return std::exp(-0.5 * z * z) / (x * p.sigma * std::sqrt(2.0 * std::numbers::pi));
}

double lognormal_cdf(const LogNormalParams& p, double x) {
  p.validate();
  if (!(x > 0.0)) return 0.0;
  return std_normal_cdf((std::log(x) - p.mu) / p.sigma);
}

double lognormal_quantile(const LogNormalParams& p, double q) {
  p.validate();
  require_probability(q);
  return std::exp(p.mu + p.sigma * std_normal_quantile(q));
}

double lognormal_log_likelihood(const LogNormalParams& p, std::span<const double> sample) {
  p.validate();
  const double norm = std::log(p.sigma) + 0.5 * std::log(2.0 * std::numbers::pi);
  double ll = 0.0;
  for (double x : sample) {
    if (!(x > 0.0)) return -kInf;
    const double lx = std::log(x);
    const double z = (lx - p.mu) / p.sigma;
    ll += -0.5 * z * z - lx - norm;
  }
  return ll;
}

FitReport<LogNormalParams> lognormal_fit(std::span<const double> sample) {
  if (sample.size() < 2) throw DataError("log-normal fit needs at least 2 values");
  double mean = 0.0;
  for (double x : sample) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw DataError("log-normal fit needs finite positive values");
    mean += std::log(x);
  }
  const double n = static_cast<double>(sample.size());
  mean /= n;
  double ss = 0.0;
  for (double x : sample) {
    const double d = std::log(x) - mean;
    ss += d * d;
  }
  const double sigma = std::sqrt(ss / n);
  if (!(sigma > 0.0)) throw DataError("log-normal fit: log-values have zero variance");

  FitReport<LogNormalParams> report;
  report.params = {mean, sigma};
  report.log_likelihood = lognormal_log_likelihood(report.params, sample);
  report.n = sample.size();
  report.converged = true;
  report.iterations = 0;
  return report;
}

std::vector<double> lognormal_sample(const LogNormalParams& p, std::size_t n,
                                     std::uint64_t seed) {
  p.validate();
  RandomStream rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = std::exp(p.mu + p.sigma * rng.normal());
  return out;
}

double gpd_cdf(const GpdParams& p, double x) {
  p.validate();
  if (!(x > p.mu_loc)) return 0.0;
  const double log_z = std::log(x - p.mu_loc) - std::log(p.kappa);
  return -std::expm1(-p.alpha * log1p_exp(log_z / p.gamma));
}

double gpd_pdf(const GpdParams& p, double x) {
  p.validate();
  if (x < p.mu_loc) return 0.0;
  if (x == p.mu_loc) {
    if (p.gamma < 1.0) return 0.0;
    if (p.gamma == 1.0) return p.alpha / p.kappa;
    return kInf;
  }
  return std::exp(gpd_log_pdf_unchecked(p, std::log(x - p.mu_loc)));
}

double gpd_quantile(const GpdParams& p, double q) {
  p.validate();
  require_probability(q);
  const double t = std::expm1(-std::log1p(-q) / p.alpha);
  return p.mu_loc + p.kappa * std::pow(t, p.gamma);
}

double gpd_log_likelihood(const GpdParams& p, std::span<const double> sample) {
  p.validate();
  const double inv_gamma = 1.0 / p.gamma;
  const double log_kappa = std::log(p.kappa);
  const double constant = std::log(p.alpha * inv_gamma) - inv_gamma * log_kappa;
  double ll = 0.0;
  for (double x : sample) {
    const double excess = x - p.mu_loc;
    if (!(excess > 0.0)) return -kInf;
    const double log_excess = std::log(excess);
    ll += constant + (inv_gamma - 1.0) * log_excess -
          (p.alpha + 1.0) * log1p_exp((log_excess - log_kappa) * inv_gamma);
  }
  return ll;
}

std::vector<double> gpd_sample(const GpdParams& p, std::size_t n, std::uint64_t seed) {
  p.validate();
  RandomStream rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = gpd_quantile(p, rng.uniform());
  return out;
}

namespace {

// Maps an unconstrained vector onto GpdParams honoring fixed coordinates.
class GpdCoordinates {
 public:
  GpdCoordinates(const GpdFitOptions& options, double upper, double span)
      : options_(options), upper_(upper), span_(span) {}

  std::size_t dimension() const {
    return 1 + !options_.fix_alpha + !options_.fix_gamma + !options_.fix_location;
  }

  GpdParams decode(std::span<const double> v) const {
    GpdParams p;
    std::size_t i = 0;
    p.kappa = std::exp(v[i++]);
    p.alpha = options_.fix_alpha ? *options_.fix_alpha : std::exp(v[i++]);
    p.gamma = options_.fix_gamma ? *options_.fix_gamma : std::exp(v[i++]);
    p.mu_loc = options_.fix_location ? *options_.fix_location : upper_ - span_ * std::exp(v[i++]);
    return p;
  }

  std::vector<double> encode(const GpdParams& p) const {
    std::vector<double> v;
    v.push_back(std::log(p.kappa));
    if (!options_.fix_alpha) v.push_back(std::log(p.alpha));
    if (!options_.fix_gamma) v.push_back(std::log(p.gamma));
    if (!options_.fix_location) {
      const double gap = std::max(upper_ - p.mu_loc, 1e-12 * span_);
      v.push_back(std::log(gap / span_));
    }
    return v;
  }

 private:
  const GpdFitOptions& options_;
  double upper_;
  double span_;
};

// Quantile-matched scale: places the start's median on the sample median.
GpdParams make_start(double alpha, double gamma, double mu_loc, double median) {
  GpdParams p;
  p.alpha = alpha;
  p.gamma = gamma;
  p.mu_loc = mu_loc;
  p.kappa = (median - mu_loc) / std::pow(std::expm1(std::log(2.0) / alpha), gamma);
  return p;
}

}  // namespace

FitReport<GpdParams> gpd_fit(std::span<const double> sample, const GpdFitOptions& options) {
  if (sample.size() < 8) throw DataError("GPD fit needs at least 8 values");
  for (double x : sample)
    if (!std::isfinite(x)) throw DataError("GPD fit needs finite values");
  const auto [min_it, max_it] = std::minmax_element(sample.begin(), sample.end());
  const double lo = *min_it;
  const double hi = *max_it;
  if (!(hi > lo)) throw DataError("GPD fit needs a non-constant sample");
  if (options.fix_alpha && !(*options.fix_alpha > 0.0))
    throw DomainError("fixed alpha must be > 0");
  if (options.fix_gamma && !(*options.fix_gamma > 0.0))
    throw DomainError("fixed gamma must be > 0");
  if (options.fix_location && !(*options.fix_location < lo))
    throw DomainError("fixed location must lie below the sample minimum");

  const double span = hi - lo;
  const double upper = lo - 1e-6 * span;
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  const double body = std::max(median - lo, 1e-3 * span);

  const GpdCoordinates coords(options, upper, span);
  auto negative_ll = [&](std::span<const double> v) {
    return -gpd_log_likelihood(coords.decode(v), sample);
  };

  struct StartShape {
    double alpha, gamma, location_fraction;
  };
  constexpr StartShape kShapes[] = {
      {1.0, 0.5, 0.5}, {1.0, 1.0, 0.1}, {0.5, 0.25, 0.9}, {2.0, 0.4, 0.3}, {1.0, 0.25, 1.0}};

  std::vector<GpdParams> starts;
  for (const auto& s : kShapes) {
    const double alpha = options.fix_alpha.value_or(s.alpha);
    const double gamma = options.fix_gamma.value_or(s.gamma);
    const double loc =
        options.fix_location.value_or(std::min(upper, lo - s.location_fraction * body));
    starts.push_back(make_start(alpha, gamma, loc, std::max(median, loc + 1e-9 * span)));
  }
  for (GpdParams extra : options.extra_starts) {
    extra.validate();
    if (options.fix_alpha) extra.alpha = *options.fix_alpha;
    if (options.fix_gamma) extra.gamma = *options.fix_gamma;
    if (options.fix_location) extra.mu_loc = *options.fix_location;
    starts.push_back(extra);
  }

  FitReport<GpdParams> best;
  best.n = sample.size();
  best.log_likelihood = -kInf;
  int total_evaluations = 0;
  NelderMeadOptions nm;
  nm.max_evaluations = 4000;

  for (const GpdParams& start : starts) {
    NelderMeadResult run = nelder_mead_minimize(negative_ll, coords.encode(start), nm);
    total_evaluations += run.evaluations;
    // Restarting from the incumbent guards against a collapsed simplex.
    for (int round = 0; round < options.max_polish_rounds; ++round) {
      NelderMeadOptions polish = nm;
      polish.initial_step = 0.1;
      NelderMeadResult next = nelder_mead_minimize(negative_ll, run.x, polish);
      total_evaluations += next.evaluations;
      const bool improved = next.value < run.value - 1e-9 * (std::abs(run.value) + 1.0);
      if (next.value <= run.value) run = std::move(next);
      if (!improved) break;
    }
    const double ll = -run.value;
    if (std::isfinite(ll) && ll > best.log_likelihood) {
      best.params = coords.decode(run.x);
      best.log_likelihood = ll;
      best.converged = run.converged;
    }
  }
  best.iterations = total_evaluations;
  if (!std::isfinite(best.log_likelihood)) best.converged = false;
  return best;
}

}  // namespace gbias
