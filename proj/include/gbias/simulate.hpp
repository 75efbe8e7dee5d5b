#pragma once

// Gibrat (X_t = R_t X_{t-1}) and Kesten (X_t = R_t X_{t-1} + eps_t) simulators
// with log-normal growth rates, plus the Hill tail-index estimator.
//
// Path p draws from derive_seed(cfg.seed, {p}); each step draws one normal for
// log R_t, then (exponential law only) one uniform for eps_t.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gbias {

/// log R ~ Normal(m, v); v is the variance.
struct GrowthLaw {
  double m = 0.0;
  double v = 0.04;
};

struct EpsilonLaw {
  enum class Kind { kConstant, kExponential };
  Kind kind = Kind::kConstant;
  double mean = 1.0;
};

struct ProcessConfig {
  double x0 = 1.0;
  std::size_t steps = 400;
  std::size_t n_paths = 10000;
  GrowthLaw growth;
  std::optional<EpsilonLaw> epsilon;  ///< absent for a pure Gibrat process
  std::uint64_t seed = 0;

  /// Throws DomainError naming the offending field.
  void validate() const;
};

using WarningSink = std::function<void(const std::string&)>;

/// X_T per path. Requires cfg.epsilon to be absent.
std::vector<double> gibrat_simulate(const ProcessConfig& cfg);

/// X_T per path. Requires cfg.epsilon. Warns through `warn` (stderr when
/// empty) if E[log R] >= 0 or E[eps] == 0, as the stationary heavy tail needs
/// both m < 0 and E[eps] > 0.
std::vector<double> kesten_simulate(const ProcessConfig& cfg, const WarningSink& warn = {});

/// Tail exponent s* solving E[R^s] = 1, i.e. -2m / v. Requires m < 0, v > 0.
double kesten_exponent(double m, double v);

struct TailEstimate {
  double index = 0.0;
  std::size_t k_used = 0;
  double std_error = 0.0;  ///< index / sqrt(k); `stderr` is a macro
};

/// ceil(n^(2/3)), at least 10.
std::size_t default_hill_k(std::size_t n) noexcept;

/// Hill estimator over the top k order statistics. Requires 10 <= k < n and
/// positive values.
TailEstimate hill_tail_index(std::span<const double> values, std::size_t k);

}  // namespace gbias
