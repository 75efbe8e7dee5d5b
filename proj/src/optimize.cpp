#include "gbias/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gbias {
namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

double safe_eval(const std::function<double(std::span<const double>)>& f,
                 const std::vector<double>& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

NelderMeadResult nelder_mead_minimize(
    const std::function<double(std::span<const double>)>& objective,
    std::vector<double> start, const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  NelderMeadResult result;
  if (dim == 0) {
    result.value = safe_eval(objective, start);
    result.x = std::move(start);
    result.evaluations = 1;
    result.converged = true;
    return result;
  }

  std::vector<std::vector<double>> simplex(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += options.initial_step;
  std::vector<double> values(dim + 1);
  int evals = 0;
  for (std::size_t i = 0; i <= dim; ++i) {
    values[i] = safe_eval(objective, simplex[i]);
    ++evals;
  }

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  auto point_along = [&](double coef, std::vector<double>& out,
                         const std::vector<double>& worst) {
    for (std::size_t j = 0; j < dim; ++j)
      out[j] = centroid[j] + coef * (centroid[j] - worst[j]);
  };

  while (evals < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[dim - 1];

    const double spread = values[worst] - values[best];
    double size = 0.0;
    for (std::size_t i = 0; i <= dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        size = std::max(size, std::abs(simplex[i][j] - simplex[best][j]));
    if (std::isfinite(values[worst]) &&
        spread <= options.f_tolerance * (std::abs(values[best]) + options.f_tolerance) &&
        size <= options.x_tolerance * (1.0 + size)) {
      result.converged = true;
      break;
    }
    if (std::isfinite(values[worst]) && spread == 0.0 && size <= 1e-14) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    point_along(kReflect, trial, simplex[worst]);
    const double f_reflect = safe_eval(objective, trial);
    ++evals;

    if (f_reflect < values[best]) {
      point_along(kExpand, trial2, simplex[worst]);
      const double f_expand = safe_eval(objective, trial2);
      ++evals;
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second_worst]) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }

    const bool outside = f_reflect < values[worst];
    point_along(outside ? kContract : -kContract, trial2, simplex[worst]);
    const double f_contract = safe_eval(objective, trial2);
    ++evals;
    if (f_contract < (outside ? f_reflect : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = f_contract;
      continue;
    }

    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < dim; ++j)
        simplex[i][j] = simplex[best][j] + kShrink * (simplex[i][j] - simplex[best][j]);
      values[i] = safe_eval(objective, simplex[i]);
      ++evals;
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  const auto best_idx = static_cast<std::size_t>(best_it - values.begin());
  result.x = simplex[best_idx];
  result.value = *best_it;
  result.evaluations = evals;
  return result;
}

}  // namespace gbias
