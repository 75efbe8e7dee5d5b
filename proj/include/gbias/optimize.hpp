#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gbias {

struct NelderMeadOptions {
  double initial_step = 0.5;
  /// Stop when the spread of simplex values falls below
  /// f_tolerance * (|f_best| + f_tolerance).
  double f_tolerance = 1e-12;
  double x_tolerance = 1e-10;
  int max_evaluations = 20000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Minimizes `objective` starting from `start`. Non-finite objective values
/// are treated as +infinity, so the objective may signal infeasible points
/// by returning NaN or inf.
NelderMeadResult nelder_mead_minimize(
    const std::function<double(std::span<const double>)>& objective,
    std::vector<double> start, const NelderMeadOptions& options = {});

}  // namespace gbias
