#pragma once

// Sample preparation: magnitude cap, sign split and quantile subsampling.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace gbias {

enum class SignBranch { kPositive, kNegative, kAll };

std::string_view to_string(SignBranch sign) noexcept;
SignBranch parse_sign(std::string_view name);

struct SamplingProtocol {
  double magnitude_cap = 1000.0;
  std::size_t quantile_points = 300;
  SignBranch sign = SignBranch::kAll;

  void validate() const;  ///< cap > 0, quantile_points >= 10
};

/// Keeps values with |v| < cap, preserving order.
std::vector<double> magnitude_filter(std::span<const double> values, double cap);

struct SignSplit {
  std::vector<double> positive;
  std::vector<double> negative;  ///< absolute values of the negative inputs
  std::size_t zeros = 0;
};

SignSplit sign_split(std::span<const double> values);

/// Empirical quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7): h = (n - 1) q, x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
/// `sorted` must be ascending and nonempty.
double empirical_quantile(std::span<const double> sorted, double q);

/// Empirical quantiles at (i - 0.5) / k, i = 1..k. Output is sorted.
std::vector<double> quantile_subsample(std::span<const double> values, std::size_t k);

}  // namespace gbias
