#include "gbias/gof.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "gbias/error.hpp"
#include "gbias/rng.hpp"

namespace gbias {
namespace {

constexpr double kClipLo = 1e-12;
constexpr double kClipHi = 1.0 - 1e-12;
constexpr std::size_t kMinTestSize = 20;

double ks_from_sorted(std::span<const double> u) {
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double above = static_cast<double>(i + 1) / n - u[i];
    const double below = u[i] - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return d;
}

AdStatistic ad_from_sorted(std::span<const double> u, AdClipping clipping) {
  const std::size_t n = u.size();
  AdStatistic out;
  auto clip = [&](double v) {
    if (v < kClipLo || v > kClipHi) {
      if (clipping == AdClipping::kStrict && (v <= 0.0 || v >= 1.0))
        throw DataError("Anderson-Darling statistic: CDF value is numerically 0 or 1");
      out.clipped = true;
      return std::clamp(v, kClipLo, kClipHi);
    }
    return v;
  };
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = clip(u[i]);
    const double hi = clip(u[n - 1 - i]);
    sum += static_cast<double>(2 * i + 1) * (std::log(lo) + std::log1p(-hi));
  }
  const double nn = static_cast<double>(n);
  out.value = -nn - sum / nn;
  return out;
}

double chi2_from_cdf_values(std::span<const double> u, std::size_t bins) {
  std::vector<std::size_t> counts(bins, 0);
  for (double v : u) {
    auto k = static_cast<std::size_t>(v * static_cast<double>(bins));
    ++counts[std::min(k, bins - 1)];
  }
  const double expected = static_cast<double>(u.size()) / static_cast<double>(bins);
  double stat = 0.0;
  for (std::size_t c : counts) {
    const double diff = static_cast<double>(c) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

void check_bins(std::size_t n, std::size_t bins) {
  if (bins < 3) throw DomainError("chi-square test needs at least 3 bins");
  if (n < 5 * bins)
    throw DataError("chi-square test needs at least 5 values per bin (n = " + std::to_string(n) +
                    ", bins = " + std::to_string(bins) + ")");
}

std::vector<double> sorted_cdf_values(std::span<const double> sample, const LogNormalParams& p) {
  if (sample.empty()) throw DataError("goodness-of-fit statistic on an empty sample");
  std::vector<double> u;
  u.reserve(sample.size());
  for (double x : sample) {
    if (!(x > 0.0)) throw DataError("goodness-of-fit sample must be positive");
    u.push_back(lognormal_cdf(p, x));
  }
  std::sort(u.begin(), u.end());
  return u;
}

// Standardized CDF values of log-values under their own ML fit. Returns false
// on a degenerate (constant) sample.
bool refit_cdf_values(std::span<const double> logs, std::vector<double>& u) {
  const double n = static_cast<double>(logs.size());
  double mean = 0.0;
  for (double z : logs) mean += z;
  mean /= n;
  double ss = 0.0;
  for (double z : logs) ss += (z - mean) * (z - mean);
  const double sigma = std::sqrt(ss / n);
  if (!(sigma > 0.0)) return false;
  u.resize(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i)
    u[i] = 0.5 * std::erfc(-(logs[i] - mean) / (sigma * std::numbers::sqrt2));
  std::sort(u.begin(), u.end());
  return true;
}

struct Observed {
  double ks = 0.0;
  AdStatistic ad;
  double chi2 = 0.0;
};

Observed statistics_from_sorted(std::span<const double> u, std::size_t bins) {
  Observed o;
  o.ks = ks_from_sorted(u);
  o.ad = ad_from_sorted(u, AdClipping::kClip);
  o.chi2 = chi2_from_cdf_values(u, bins);
  return o;
}

double asymptotic_p(GofMethod method, const Observed& obs, std::size_t n, int dof) {
  const double sn = std::sqrt(static_cast<double>(n));
  switch (method) {
    case GofMethod::kKs:
      return kolmogorov_survival((sn + 0.12 + 0.11 / sn) * obs.ks);
    case GofMethod::kAd:
      return std::clamp(1.0 - anderson_darling_asymptotic_cdf(obs.ad.value), 0.0, 1.0);
    case GofMethod::kChi2: {
      if (dof < 1) throw DataError("chi-square test needs at least 4 bins for a positive dof");
      const boost::math::chi_squared_distribution<double> law(dof);
      return boost::math::cdf(boost::math::complement(law, obs.chi2));
    }
  }
  return 1.0;
}

double pick(GofMethod method, const Observed& o) {
  switch (method) {
    case GofMethod::kKs: return o.ks;
    case GofMethod::kAd: return o.ad.value;
    case GofMethod::kChi2: return o.chi2;
  }
  return 0.0;
}

}  // namespace

Stars stars_for(double p_value) noexcept {
  if (p_value < 0.01) return Stars::kThree;
  if (p_value < 0.03) return Stars::kTwo;
  if (p_value < 0.05) return Stars::kOne;
  return Stars::kNone;
}

std::string_view to_string(GofMethod method) noexcept {
  switch (method) {
    case GofMethod::kKs: return "KS";
    case GofMethod::kChi2: return "CHI2";
    case GofMethod::kAd: return "AD";
  }
  return "?";
}

std::string_view to_string(Stars stars) noexcept {
  switch (stars) {
    case Stars::kNone: return "";
    case Stars::kOne: return "*";
    case Stars::kTwo: return "**";
    case Stars::kThree: return "***";
  }
  return "";
}

GofMethod parse_method(std::string_view name) {
  if (name == "KS" || name == "ks") return GofMethod::kKs;
  if (name == "CHI2" || name == "chi2") return GofMethod::kChi2;
  if (name == "AD" || name == "ad") return GofMethod::kAd;
  throw DomainError("unknown goodness-of-fit method: " + std::string(name));
}

void BootstrapConfig::validate() const {
  if (replicates < 100)
    throw DomainError("bootstrap needs at least 100 replicates, got " +
                      std::to_string(replicates));
}

std::size_t default_chi2_bins(std::size_t n) noexcept { return std::min<std::size_t>(20, n / 5); }

double ks_statistic(std::span<const double> sample, const LogNormalParams& p) {
  return ks_from_sorted(sorted_cdf_values(sample, p));
}

Chi2Statistic chi2_statistic(std::span<const double> sample, const LogNormalParams& p,
                             std::size_t bins) {
  check_bins(sample.size(), bins);
  const auto u = sorted_cdf_values(sample, p);
  return {chi2_from_cdf_values(u, bins), static_cast<int>(bins) - 3};
}

AdStatistic ad_statistic(std::span<const double> sample, const LogNormalParams& p,
                         AdClipping clipping) {
  return ad_from_sorted(sorted_cdf_values(sample, p), clipping);
}

std::array<GofResult, 3> gof_test_all(std::span<const double> sample, const GofOptions& options) {
  if (sample.size() < kMinTestSize)
    throw DataError("goodness-of-fit test needs at least 20 values, got " +
                    std::to_string(sample.size()));
  if (options.mode == PValueMode::kBootstrap) options.boot.validate();
  const std::size_t n = sample.size();
  const std::size_t bins = options.chi2_bins == 0 ? default_chi2_bins(n) : options.chi2_bins;
  check_bins(n, bins);

  const auto fit = lognormal_fit(sample);
  const auto u = sorted_cdf_values(sample, fit.params);
  const Observed obs = statistics_from_sorted(u, bins);
  const int dof = static_cast<int>(bins) - 3;

  std::array<double, 3> p_values{};
  if (options.mode == PValueMode::kAsymptotic) {
    for (std::size_t m = 0; m < 3; ++m) p_values[m] = asymptotic_p(kAllMethods[m], obs, n, dof);
  } else {
    std::array<std::size_t, 3> exceed{};
    std::vector<double> logs(n), ru;
    for (std::size_t r = 0; r < options.boot.replicates; ++r) {
      // Log-values of lognormal_sample(fit.params, n, seed): same stream.
      RandomStream rng(derive_seed(options.boot.seed, {r}));
      for (double& z : logs) z = fit.params.mu + fit.params.sigma * rng.normal();
      if (!refit_cdf_values(logs, ru)) {
        for (auto& e : exceed) ++e;
        continue;
      }
      const Observed rep = statistics_from_sorted(ru, bins);
      for (std::size_t m = 0; m < 3; ++m)
        if (pick(kAllMethods[m], rep) >= pick(kAllMethods[m], obs)) ++exceed[m];
    }
    const double denom = static_cast<double>(options.boot.replicates + 1);
    for (std::size_t m = 0; m < 3; ++m)
      p_values[m] = static_cast<double>(exceed[m] + 1) / denom;
  }

  std::array<GofResult, 3> out;
  for (std::size_t m = 0; m < 3; ++m) {
    GofResult& res = out[m];
    res.method = kAllMethods[m];
    res.statistic = pick(res.method, obs);
    res.p_value = p_values[m];
    res.n = n;
    res.stars = stars_for(res.p_value);
    if (res.method == GofMethod::kChi2) res.dof = dof;
    if (res.method == GofMethod::kAd) res.clipped = obs.ad.clipped;
  }
  return out;
}

GofResult gof_test(std::span<const double> sample, GofMethod method, const GofOptions& options) {
  // Shares the replicate stream with gof_test_all so both agree exactly.
  const auto all = gof_test_all(sample, options);
  return all[static_cast<std::size_t>(method)];
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.18) {
    // Jacobi-theta form, fast for small x.
    const double pi = std::numbers::pi;
    const double w = -pi * pi / (8.0 * x * x);
    double cdf = 0.0;
    for (int k = 1; k <= 7; k += 2) cdf += std::exp(w * k * k);
    cdf *= std::sqrt(2.0 * pi) / x;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Marsaglia & Marsaglia (2004) approximation to the limiting AD law.
double anderson_darling_asymptotic_cdf(double z) {
  if (z <= 0.0) return 0.0;
  if (z < 2.0)
    return std::exp(-1.2337141 / z) / std::sqrt(z) *
           (2.00012 +
            (0.247105 - (0.0649821 - (0.0347962 - (0.011672 - 0.00168691 * z) * z) * z) * z) * z);
  return std::exp(
      -std::exp(1.0776 - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) * z) * z));
}

}  // namespace gbias
