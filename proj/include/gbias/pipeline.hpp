#pragma once

// End-to-end analysis: daily p-value series per indicator, log-space Q-Q data
// and the log-normal / GPD (alpha = 1) / GPD (alpha free) comparison.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gbias/distributions.hpp"
#include "gbias/gof.hpp"
#include "gbias/ingest.hpp"
#include "gbias/sampling.hpp"

namespace gbias {

struct DailyEntry {
  Date date;
  std::size_t section_size = 0;     ///< retained values before subsampling
  std::array<GofResult, 3> results;  ///< indexed like kAllMethods
};

struct SkippedDay {
  Date date;
  std::string reason;
};

struct MethodMinimum {
  GofMethod method = GofMethod::kKs;
  Date date;
  double p_value = 1.0;
};

struct PValueSeries {
  Indicator indicator = Indicator::kPE;
  SignBranch sign = SignBranch::kAll;
  std::vector<DailyEntry> entries;  ///< ascending dates
  std::vector<SkippedDay> skipped;
  std::array<std::optional<MethodMinimum>, 3> minima;
};

/// Per-method lowest p-value; ties go to the earliest date.
std::array<std::optional<MethodMinimum>, 3> compute_minima(std::span<const DailyEntry> entries);

/// Seed of the bootstrap for one (day, indicator, sign, method) test.
std::uint64_t daily_test_seed(std::uint64_t master, Date date, Indicator indicator,
                              SignBranch sign, GofMethod method);

/// For every date of the indicator: cross-section, subsample to
/// protocol.quantile_points, then test with each method. Days whose section
/// is empty or smaller than the subsample size are skipped with a reason.
/// `sign` overrides protocol.sign. The bootstrap seed in `options` is the
/// master seed. Throws DataError when no day can be analyzed.
PValueSeries daily_bias_series(const IndicatorPanel& panel, Indicator indicator, SignBranch sign,
                               const SamplingProtocol& protocol, const GofOptions& options);

struct QQPoint {
  double probability = 0.0;
  double theoretical = 0.0;
  double empirical = 0.0;
};

struct QQData {
  std::vector<QQPoint> points;  ///< ascending theoretical quantiles
  LogNormalParams fitted;
};

/// Empirical quantiles at (i - 0.5) / k against the log-normal fitted to the
/// whole section. On a log-log scale a log-normal section lies on y = x.
QQData qq_plot_data(std::span<const double> values, std::size_t k);
QQData qq_plot_data(const CrossSection& section, std::size_t k);

struct ShapeComparison {
  FitReport<LogNormalParams> lognormal;
  FitReport<GpdParams> gpd1;  ///< alpha fixed at 1
  FitReport<GpdParams> gpd2;  ///< alpha free
  /// 2k - 2 log L with k = 2, 3, 4; +inf for a failed fit.
  std::array<double, 3> aic{};
};

inline constexpr std::size_t kMinShapeSample = 50;

ShapeComparison fit_bias_shape(std::span<const double> values);
ShapeComparison fit_bias_shape(const CrossSection& section);

struct DensityRow {
  double x = 0.0;
  double lognormal = 0.0;
  double gpd1 = 0.0;
  double gpd2 = 0.0;
};

/// Fitted densities on an even grid spanning the values' 0.5%-99.5% range.
std::vector<DensityRow> density_overlay(const ShapeComparison& cmp, std::span<const double> values,
                                        std::size_t points = 200);

}  // namespace gbias
