#include "gbias/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gbias/error.hpp"

namespace gbias {

std::string_view to_string(SignBranch sign) noexcept {
  switch (sign) {
    case SignBranch::kPositive: return "positive";
    case SignBranch::kNegative: return "negative";
    case SignBranch::kAll: return "all";
  }
  return "?";
}

SignBranch parse_sign(std::string_view name) {
  if (name == "positive" || name == "+") return SignBranch::kPositive;
  if (name == "negative" || name == "-") return SignBranch::kNegative;
  if (name == "all") return SignBranch::kAll;
  throw DomainError("unknown sign branch: " + std::string(name));
}

void SamplingProtocol::validate() const {
  if (!(magnitude_cap > 0.0)) throw DomainError("magnitude cap must be > 0");
  if (quantile_points < 10)
    throw DomainError("quantile points must be >= 10, got " + std::to_string(quantile_points));
}

std::vector<double> magnitude_filter(std::span<const double> values, double cap) {
  if (!(cap > 0.0)) throw DomainError("magnitude cap must be > 0");
  std::vector<double> out;
  out.reserve(values.size());
  std::copy_if(values.begin(), values.end(), std::back_inserter(out),
               [cap](double v) { return std::abs(v) < cap; });
  return out;
}

SignSplit sign_split(std::span<const double> values) {
  SignSplit out;
  for (double v : values) {
    if (v > 0.0)
      out.positive.push_back(v);
    else if (v < 0.0)
      out.negative.push_back(-v);
    else
      ++out.zeros;
  }
  return out;
}

double empirical_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double w = h - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

std::vector<double> quantile_subsample(std::span<const double> values, std::size_t k) {
  if (values.empty()) throw DataError("quantile subsample of an empty sample");
  if (k == 0) throw DomainError("quantile subsample needs k >= 1");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i)
    out[i] = empirical_quantile(sorted, (static_cast<double>(i) + 0.5) / static_cast<double>(k));
  // Interpolation can break monotonicity by one ulp; restore it.
  for (std::size_t i = 1; i < k; ++i) out[i] = std::max(out[i], out[i - 1]);
  return out;
}

}  // namespace gbias
