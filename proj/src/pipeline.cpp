#include "gbias/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gbias/error.hpp"
#include "gbias/rng.hpp"

namespace gbias {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double aic(double log_likelihood, int k, bool converged) {
  if (!converged || !std::isfinite(log_likelihood)) return kInf;
  return 2.0 * k - 2.0 * log_likelihood;
}

}  // namespace

std::array<std::optional<MethodMinimum>, 3> compute_minima(std::span<const DailyEntry> entries) {
  std::array<std::optional<MethodMinimum>, 3> minima;
  for (const DailyEntry& e : entries) {
    for (std::size_t m = 0; m < 3; ++m) {
      const GofResult& r = e.results[m];
      if (!minima[m] || r.p_value < minima[m]->p_value)
        minima[m] = MethodMinimum{r.method, e.date, r.p_value};
    }
  }
  return minima;
}

std::uint64_t daily_test_seed(std::uint64_t master, Date date, Indicator indicator,
                              SignBranch sign, GofMethod method) {
  const auto day = std::chrono::sys_days{date}.time_since_epoch().count();
  return derive_seed(master, {static_cast<std::uint64_t>(day), static_cast<std::uint64_t>(indicator),
                              static_cast<std::uint64_t>(sign), static_cast<std::uint64_t>(method)});
}

PValueSeries daily_bias_series(const IndicatorPanel& panel, Indicator indicator, SignBranch sign,
                               const SamplingProtocol& protocol, const GofOptions& options) {
  protocol.validate();
  if (options.mode == PValueMode::kBootstrap) options.boot.validate();
  SamplingProtocol proto = protocol;
  proto.sign = sign;

  PValueSeries series;
  series.indicator = indicator;
  series.sign = sign;
  const auto dates = panel.dates(indicator);
  if (dates.empty())
    throw DataError("panel has no rows for indicator " + std::string(to_string(indicator)));

  for (const Date& date : dates) {
    CrossSection section;
    try {
      section = cross_section(panel, date, indicator, proto);
    } catch (const DataError& e) {
      series.skipped.push_back({date, e.what()});
      continue;
    }
    if (section.values.size() < proto.quantile_points) {
      series.skipped.push_back({date, "only " + std::to_string(section.values.size()) +
                                          " values, fewer than the " +
                                          std::to_string(proto.quantile_points) +
                                          " quantile points"});
      continue;
    }
    const auto sub = quantile_subsample(section.values, proto.quantile_points);
    DailyEntry entry;
    entry.date = date;
    entry.section_size = section.values.size();
    try {
      for (std::size_t m = 0; m < 3; ++m) {
        GofOptions day_options = options;
        day_options.boot.seed = daily_test_seed(options.boot.seed, date, indicator, sign,
                                                kAllMethods[m]);
        entry.results[m] = gof_test(sub, kAllMethods[m], day_options);
      }
    } catch (const DataError& e) {
      series.skipped.push_back({date, e.what()});
      continue;
    }
    series.entries.push_back(std::move(entry));
  }
  if (series.entries.empty())
    throw DataError("no analyzable days for " + std::string(to_string(indicator)) + " " +
                    std::string(to_string(sign)));
  series.minima = compute_minima(series.entries);
  return series;
}

QQData qq_plot_data(std::span<const double> values, std::size_t k) {
  if (k < 10) throw DomainError("Q-Q data needs k >= 10");
  if (values.size() < k)
    throw DataError("Q-Q data needs at least k = " + std::to_string(k) + " values, got " +
                    std::to_string(values.size()));
  QQData qq;
  qq.fitted = lognormal_fit(values).params;
  const auto empirical = quantile_subsample(values, k);
  qq.points.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double prob = (static_cast<double>(i) + 0.5) / static_cast<double>(k);
    qq.points[i] = {prob, lognormal_quantile(qq.fitted, prob), empirical[i]};
  }
  return qq;
}

QQData qq_plot_data(const CrossSection& section, std::size_t k) {
  return qq_plot_data(section.values, k);
}

ShapeComparison fit_bias_shape(std::span<const double> values) {
  if (values.size() < kMinShapeSample)
    throw DataError("shape comparison needs n >= 50 values, got " + std::to_string(values.size()));
  ShapeComparison cmp;
  cmp.lognormal.n = cmp.gpd1.n = cmp.gpd2.n = values.size();
  cmp.lognormal.log_likelihood = cmp.gpd1.log_likelihood = cmp.gpd2.log_likelihood = -kInf;

  try {
    cmp.lognormal = lognormal_fit(values);
  } catch (const DataError&) {
  }
  try {
    GpdFitOptions one;
    one.fix_alpha = 1.0;
    cmp.gpd1 = gpd_fit(values, one);
  } catch (const DataError&) {
  }
  try {
    GpdFitOptions free;
    // Starting from the alpha = 1 optimum keeps the nested fit at least as good.
    if (std::isfinite(cmp.gpd1.log_likelihood)) free.extra_starts.push_back(cmp.gpd1.params);
    cmp.gpd2 = gpd_fit(values, free);
  } catch (const DataError&) {
  }
  cmp.aic = {aic(cmp.lognormal.log_likelihood, 2, cmp.lognormal.converged),
             aic(cmp.gpd1.log_likelihood, 3, cmp.gpd1.converged),
             aic(cmp.gpd2.log_likelihood, 4, cmp.gpd2.converged)};
  return cmp;
}

ShapeComparison fit_bias_shape(const CrossSection& section) { return fit_bias_shape(section.values); }

std::vector<DensityRow> density_overlay(const ShapeComparison& cmp, std::span<const double> values,
                                        std::size_t points) {
  if (values.empty() || points < 2) throw DataError("density overlay needs values and >= 2 points");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = empirical_quantile(sorted, 0.005);
  const double hi = empirical_quantile(sorted, 0.995);
  std::vector<DensityRow> rows(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    DensityRow& r = rows[i];
    r.x = x;
    r.lognormal = cmp.lognormal.converged && x > 0.0 ? lognormal_pdf(cmp.lognormal.params, x) : 0.0;
    r.gpd1 = cmp.gpd1.converged ? gpd_pdf(cmp.gpd1.params, x) : 0.0;
    r.gpd2 = cmp.gpd2.converged ? gpd_pdf(cmp.gpd2.params, x) : 0.0;
  }
  return rows;
}

}  // namespace gbias
