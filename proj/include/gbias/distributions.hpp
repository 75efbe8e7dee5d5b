#pragma once

// Log-normal and four-parameter generalized Pareto laws.
//
// The generalized Pareto family used here is
//
//   F(x) = 1 - (1 + ((x - mu_loc) / kappa)^(1/gamma))^(-alpha),  x > mu_loc
//
// with survival tail ~ x^(-alpha/gamma). It is not the peaks-over-threshold
// GPD of extreme-value theory; gamma = 1, mu_loc = 0 gives the Lomax law.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gbias {

struct LogNormalParams {
  double mu = 0.0;     ///< mean of log-values
  double sigma = 1.0;  ///< standard deviation of log-values, > 0

  void validate() const;
};

struct GpdParams {
  double kappa = 1.0;   ///< scale, > 0
  double alpha = 1.0;   ///< tail-weight exponent, > 0
  double gamma = 1.0;   ///< shape exponent, > 0
  double mu_loc = 0.0;  ///< location, lower end of the support

  void validate() const;
  /// Exponent of the power-law survival tail, alpha / gamma.
  double tail_exponent() const noexcept { return alpha / gamma; }
};

template <class Params>
struct FitReport {
  Params params;
  double log_likelihood = 0.0;
  std::size_t n = 0;
  bool converged = false;
  int iterations = 0;
};

// Log-normal

double lognormal_pdf(const LogNormalParams& p, double x);
/// Returns 0 for x <= 0.
double lognormal_cdf(const LogNormalParams& p, double x);
double lognormal_quantile(const LogNormalParams& p, double q);
double lognormal_log_likelihood(const LogNormalParams& p, std::span<const double> sample);

/// Closed-form maximum likelihood: mean and population standard deviation of
/// the log-values. Throws DataError on n < 2, nonpositive values or zero
/// log-variance.
FitReport<LogNormalParams> lognormal_fit(std::span<const double> sample);

std::vector<double> lognormal_sample(const LogNormalParams& p, std::size_t n,
                                     std::uint64_t seed);

// Generalized Pareto

double gpd_cdf(const GpdParams& p, double x);

/// Density. At x == mu_loc the limit is returned: 0 for gamma < 1,
/// alpha / kappa for gamma == 1 and +inf for gamma > 1.
double gpd_pdf(const GpdParams& p, double x);

double gpd_quantile(const GpdParams& p, double q);

/// Sum of log-densities; -inf if any point lies at or below mu_loc.
double gpd_log_likelihood(const GpdParams& p, std::span<const double> sample);

std::vector<double> gpd_sample(const GpdParams& p, std::size_t n, std::uint64_t seed);

struct GpdFitOptions {
  std::optional<double> fix_alpha;     ///< 1.0 gives the alpha = 1 sub-family
  std::optional<double> fix_gamma;
  std::optional<double> fix_location;  ///< must lie below min(sample)
  /// Additional starting points tried after the built-in ones. Free
  /// coordinates are taken from each start; fixed ones are overridden.
  std::vector<GpdParams> extra_starts;
  int max_polish_rounds = 4;
};

/// Maximum likelihood over the free parameters. The location is searched
/// below min(sample) - 1e-6 * (max - min). Throws DataError for n < 8 or a
/// constant sample; a failed optimization is reported with converged = false.
FitReport<GpdParams> gpd_fit(std::span<const double> sample, const GpdFitOptions& options = {});

}  // namespace gbias
