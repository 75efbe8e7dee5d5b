#pragma once

// Goodness-of-fit of a positive sample against a log-normal null.
//
// Statistics (KS, Pearson chi-square on equal-probability bins, AD) are
// computed against given parameters. gof_test() estimates the parameters by
// maximum likelihood and, by default, calibrates the statistic with a
// parametric bootstrap that refits every replicate, so the p-value accounts
// for the estimation. Replicate r draws from seed derive_seed(boot.seed, {r}).

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "gbias/distributions.hpp"

namespace gbias {

enum class GofMethod { kKs, kChi2, kAd };
inline constexpr std::array<GofMethod, 3> kAllMethods = {GofMethod::kKs, GofMethod::kChi2,
                                                         GofMethod::kAd};

/// Significance marks: *** below 1%, ** below 3%, * below 5%.
enum class Stars { kNone, kOne, kTwo, kThree };

Stars stars_for(double p_value) noexcept;
std::string_view to_string(GofMethod method) noexcept;
std::string_view to_string(Stars stars) noexcept;
GofMethod parse_method(std::string_view name);

struct GofResult {
  GofMethod method = GofMethod::kKs;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  Stars stars = Stars::kNone;
  std::optional<int> dof;  ///< chi-square only
  bool clipped = false;    ///< AD only: a CDF value was clipped into [1e-12, 1 - 1e-12]
};

struct BootstrapConfig {
  std::size_t replicates = 2000;
  std::uint64_t seed = 0;

  void validate() const;  ///< replicates >= 100
};

enum class PValueMode {
  kBootstrap,
  /// Classical limiting laws for a fully specified null. Anticonservative
  /// when parameters are estimated; kept for comparison only.
  kAsymptotic,
};

struct GofOptions {
  BootstrapConfig boot;
  PValueMode mode = PValueMode::kBootstrap;
  /// 0 selects min(20, n / 5) bins.
  std::size_t chi2_bins = 0;
};

double ks_statistic(std::span<const double> sample, const LogNormalParams& p);

struct Chi2Statistic {
  double statistic = 0.0;
  int dof = 0;  ///< bins - 1 - 2
};

/// Requires bins >= 3 and n >= 5 * bins.
Chi2Statistic chi2_statistic(std::span<const double> sample, const LogNormalParams& p,
                             std::size_t bins);

struct AdStatistic {
  double value = 0.0;
  bool clipped = false;
};

enum class AdClipping { kClip, kStrict };

/// With kStrict, a CDF value of exactly 0 or 1 throws DataError.
AdStatistic ad_statistic(std::span<const double> sample, const LogNormalParams& p,
                         AdClipping clipping = AdClipping::kClip);

std::size_t default_chi2_bins(std::size_t n) noexcept;

/// Fits the null and tests. Requires n >= 20.
GofResult gof_test(std::span<const double> sample, GofMethod method, const GofOptions& options);

/// All three methods from one set of bootstrap replicates. Each entry equals
/// gof_test() for that method with the same options.
std::array<GofResult, 3> gof_test_all(std::span<const double> sample, const GofOptions& options);

// Limiting laws used by the asymptotic mode.
double kolmogorov_survival(double x);
double anderson_darling_asymptotic_cdf(double a2);

}  // namespace gbias
