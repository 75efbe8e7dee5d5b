#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gbias/distributions.hpp"
#include "gbias/error.hpp"
#include "oracles.hpp"

using namespace gbias;

namespace {

const GpdParams kGpd1{18.82, 1.0, 0.385, 0.993};
const GpdParams kGpd2{13.70, 0.515, 0.238, 0.993};

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_SUITE("lognormal") {
  TEST_CASE("pdf values") {
    const LogNormalParams std_ln{0.0, 1.0};
    CHECK(lognormal_pdf(std_ln, 1e-300) == 0.0);
    CHECK(lognormal_pdf(std_ln, 1.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));
    const LogNormalParams p{0.5, 2.0};
    const double numeric = oracle::derivative([&](double x) { return lognormal_cdf(p, x); }, 3.0, 1e-3);
    CHECK(std::abs(lognormal_pdf(p, 3.0) - numeric) < 1e-6);
    // mpmath reference
    CHECK(lognormal_pdf(p, 3.0) == doctest::Approx(0.06357785338779412).epsilon(1e-13));
  }

  TEST_CASE("pdf domain errors") {
    CHECK_THROWS_AS(lognormal_pdf({0.0, 1.0}, 0.0), DomainError);
    CHECK_THROWS_AS(lognormal_pdf({0.0, 1.0}, -2.0), DomainError);
    CHECK_THROWS_AS(lognormal_pdf({0.0, 0.0}, 1.0), DomainError);
    CHECK_THROWS_AS(lognormal_cdf({0.0, -1.0}, 1.0), DomainError);
  }

  TEST_CASE("cdf values") {
    CHECK(lognormal_cdf({0.0, 1.0}, 1.0) == 0.5);
    CHECK(lognormal_cdf({2.0, 0.5}, std::exp(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(lognormal_cdf({0.0, 1.0}, 0.0) == 0.0);
    CHECK(lognormal_cdf({0.0, 1.0}, -3.0) == 0.0);
    const double phi1 = oracle::normal_cdf_by_quadrature(1.0);
    CHECK(phi1 == doctest::Approx(0.8413447460685429).epsilon(1e-12));
    CHECK(lognormal_cdf({0.0, 1.0}, std::numbers::e) == doctest::Approx(phi1).epsilon(1e-12));
  }

  TEST_CASE("quantile values") {
    CHECK(lognormal_quantile({0.0, 1.0}, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lognormal_quantile({1.0, 1.0}, 0.5) == doctest::Approx(std::numbers::e).epsilon(1e-15));
    const LogNormalParams p{0.0, 1.0};
    const double by_bisection =
        oracle::bisect([&](double x) { return lognormal_cdf(p, x); }, 0.975, 1.0, 20.0);
    CHECK(by_bisection == doctest::Approx(7.099071384231336).epsilon(1e-12));
    CHECK(lognormal_quantile(p, 0.975) == doctest::Approx(by_bisection).epsilon(1e-12));
    CHECK_THROWS_AS(lognormal_quantile(p, 0.0), DomainError);
    CHECK_THROWS_AS(lognormal_quantile(p, 1.0), DomainError);
    CHECK_THROWS_AS(lognormal_quantile(p, 1.5), DomainError);
  }

  TEST_CASE("fit closed form and errors") {
    const std::vector<double> two{1.0, std::exp(2.0)};
    const auto fit = lognormal_fit(two);
    CHECK(fit.params.mu == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fit.params.sigma == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fit.converged);
    CHECK(fit.n == 2);
    CHECK(std::isfinite(fit.log_likelihood));

    const double e = std::numbers::e;
    CHECK_THROWS_AS(lognormal_fit(std::vector<double>{e, e, e, e}), DataError);
    CHECK_THROWS_AS(lognormal_fit(std::vector<double>{1.0}), DataError);
    CHECK_THROWS_AS(lognormal_fit(std::vector<double>{1.0, 0.0, 2.0}), DataError);
    CHECK_THROWS_AS(lognormal_fit(std::vector<double>{1.0, -4.0, 2.0}), DataError);
  }

  TEST_CASE("fit recovers parameters and dominates the truth") {
    const LogNormalParams truth{0.3, 0.7};
    const auto sample = lognormal_sample(truth, 10000, 314);
    const auto fit = lognormal_fit(sample);
    CHECK(std::abs(fit.params.mu - 0.3) <= 0.03);
    CHECK(std::abs(fit.params.sigma - 0.7) <= 0.03);
    CHECK(lognormal_log_likelihood(truth, sample) <= fit.log_likelihood);
  }

  TEST_CASE("sampling") {
    const LogNormalParams p{0.2, 0.9};
    CHECK(lognormal_sample(p, 1, 99) == lognormal_sample(p, 1, 99));
    CHECK(lognormal_sample(p, 10, 1) != lognormal_sample(p, 10, 2));

    const auto big = lognormal_sample({0.0, 1.0}, 100000, 42);
    double mean_log = 0.0;
    for (double x : big) mean_log += std::log(x);
    mean_log /= static_cast<double>(big.size());
    CHECK(std::abs(mean_log) <= 0.02);

    const auto narrow = lognormal_sample({5.0, 0.1}, 1000, 3);
    for (double x : narrow) {
      CHECK(x > std::exp(4.0));
      CHECK(x < std::exp(6.0));
    }
  }
}

TEST_SUITE("gpd") {
  TEST_CASE("cdf values") {
    CHECK(gpd_cdf(kGpd1, kGpd1.mu_loc) == 0.0);
    CHECK(gpd_cdf(kGpd2, kGpd2.mu_loc - 5.0) == 0.0);
    CHECK(gpd_cdf({1.0, 1.0, 1.0, 0.0}, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    const double reference = oracle::gpd_cdf_high_precision(18.82, 1.0, 0.385, 0.993, 20.0);
    CHECK(reference == doctest::Approx(0.5064199057471279).epsilon(1e-14));
    CHECK(gpd_cdf(kGpd1, 20.0) == doctest::Approx(reference).epsilon(1e-13));
  }

  TEST_CASE("cdf is nondecreasing towards 1") {
    double prev = 0.0;
    for (double x = 0.5; x < 1e7; x *= 1.37) {
      const double f = gpd_cdf(kGpd2, x);
      CHECK(f >= prev);
      prev = f;
    }
    CHECK(prev > 0.999);
  }

  TEST_CASE("Lomax special case") {
    for (double a : {0.3, 1.0, 2.5})
      for (double x : {0.01, 0.5, 3.0, 40.0}) {
        const double lomax = 1.0 - std::pow(1.0 + x / 2.0, -a);
        CHECK(std::abs(gpd_cdf({2.0, a, 1.0, 0.0}, x) - lomax) < 1e-15);
      }
  }

  TEST_CASE("pdf values and edge behaviour") {
    CHECK(gpd_pdf({1.0, 1.0, 1.0, 0.0}, 1.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(gpd_pdf(kGpd2, 5.0) == doctest::Approx(0.003057606042807470).epsilon(1e-12));
    const auto cdf2 = [](double x) { return gpd_cdf(kGpd2, x); };
    CHECK(rel_diff(gpd_pdf(kGpd2, 5.0), oracle::derivative(cdf2, 5.0, 1e-3)) < 1e-6);

    // Limits at the lower support bound.
    CHECK(gpd_pdf(kGpd1, kGpd1.mu_loc) == 0.0);
    CHECK(gpd_pdf({2.0, 3.0, 1.0, 0.0}, 0.0) == doctest::Approx(1.5));
    CHECK(std::isinf(gpd_pdf({2.0, 3.0, 1.5, 0.0}, 0.0)));
    const double near = gpd_pdf(kGpd1, kGpd1.mu_loc + 1e-12);
    CHECK(std::isfinite(near));
    CHECK(near >= 0.0);
    CHECK(std::isfinite(gpd_pdf({2.0, 3.0, 1.5, 0.0}, 1e-12)));
    CHECK(gpd_pdf(kGpd1, 0.0) == 0.0);
  }

  TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(gpd_cdf({0.0, 1.0, 1.0, 0.0}, 1.0), DomainError);
    CHECK_THROWS_AS(gpd_pdf({1.0, -1.0, 1.0, 0.0}, 1.0), DomainError);
    CHECK_THROWS_AS(gpd_quantile({1.0, 1.0, 0.0, 0.0}, 0.5), DomainError);
    CHECK_THROWS_AS(gpd_quantile(kGpd1, 0.0), DomainError);
    CHECK_THROWS_AS(gpd_quantile(kGpd1, 1.0), DomainError);
  }

  TEST_CASE("quantile") {
    CHECK(gpd_quantile({1.0, 1.0, 1.0, 0.0}, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(gpd_quantile(kGpd1, 1e-300) == doctest::Approx(kGpd1.mu_loc).epsilon(1e-12));
    CHECK(std::abs(gpd_cdf(kGpd1, gpd_quantile(kGpd1, 0.9)) - 0.9) < 1e-10);
  }

  TEST_CASE("sampling") {
    CHECK(gpd_sample(kGpd2, 5, 17) == gpd_sample(kGpd2, 5, 17));
    for (double x : gpd_sample(kGpd1, 2000, 5)) CHECK(x > kGpd1.mu_loc);
    const auto lomax = gpd_sample({1.0, 1.0, 1.0, 0.0}, 50000, 7);
    const double below = static_cast<double>(std::count_if(lomax.begin(), lomax.end(),
                                                           [](double x) { return x < 1.0; })) /
                         50000.0;
    CHECK(below >= 0.49);
    CHECK(below <= 0.51);
  }

  TEST_CASE("log-likelihood outside the support") {
    const std::vector<double> xs{1.0, 2.0, 0.5};
    CHECK(gpd_log_likelihood({1.0, 1.0, 1.0, 0.6}, xs) == -std::numeric_limits<double>::infinity());
  }
}

TEST_SUITE("invariants") {
  TEST_CASE("round trips on interior points") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> unif(0.001, 0.999);
    const LogNormalParams lns[] = {{0.0, 1.0}, {0.5, 2.0}, {-1.0, 0.3}, {3.0, 1.1}};
    const GpdParams gpds[] = {kGpd1, kGpd2, {1.0, 1.0, 1.0, 0.0}, {3.0, 2.0, 1.7, -4.0}};
    for (int i = 0; i < 100; ++i) {
      const double q = unif(gen);
      for (const auto& p : lns) {
        CHECK(std::abs(lognormal_cdf(p, lognormal_quantile(p, q)) - q) < 1e-10);
        const double x = std::exp(p.mu + p.sigma * (unif(gen) * 6.0 - 3.0));
        CHECK(rel_diff(lognormal_quantile(p, lognormal_cdf(p, x)), x) < 1e-8);
      }
      for (const auto& p : gpds) {
        CHECK(std::abs(gpd_cdf(p, gpd_quantile(p, q)) - q) < 1e-10);
        const double x = gpd_quantile(p, unif(gen));
        CHECK(rel_diff(gpd_quantile(p, gpd_cdf(p, x)), x) < 1e-8);
      }
    }
  }

  TEST_CASE("pdf matches the derivative of the cdf") {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> unif(0.001, 0.999);
    const LogNormalParams ln{0.5, 2.0};
    for (int i = 0; i < 100; ++i) {
      const double x = lognormal_quantile(ln, unif(gen));
      const double d = oracle::derivative([&](double t) { return lognormal_cdf(ln, t); }, x, 1e-3 * x);
      CHECK(rel_diff(lognormal_pdf(ln, x), d) < 1e-6);
    }
    for (const GpdParams& p : {kGpd1, kGpd2}) {
      for (int i = 0; i < 100; ++i) {
        const double x = gpd_quantile(p, unif(gen));
        const double h = 1e-3 * (x - p.mu_loc);
        const double d = oracle::derivative([&](double t) { return gpd_cdf(p, t); }, x, h);
        CHECK(rel_diff(gpd_pdf(p, x), d) < 1e-6);
      }
    }
  }

  TEST_CASE("densities integrate to one") {
    for (const LogNormalParams& p : {LogNormalParams{0.0, 1.0}, LogNormalParams{0.5, 2.0}}) {
      const double total = oracle::simpson(
          [&](double t) { return lognormal_pdf(p, std::exp(t)) * std::exp(t); },
          p.mu - 14.0 * p.sigma, p.mu + 14.0 * p.sigma, 200000);
      CHECK(std::abs(total - 1.0) < 1e-6);
    }
    for (const GpdParams& p : {kGpd1, kGpd2}) {
      const double total = oracle::simpson(
          [&](double t) { return gpd_pdf(p, p.mu_loc + std::exp(t)) * std::exp(t); }, -40.0, 80.0,
          400000);
      CHECK(std::abs(total - 1.0) < 1e-6);
    }
  }
}

TEST_SUITE("gpd_fit") {
  TEST_CASE("degenerate samples") {
    CHECK_THROWS_AS(gpd_fit(std::vector<double>(20, 3.0)), DataError);
    CHECK_THROWS_AS(gpd_fit(std::vector<double>{1, 2, 3, 4, 5, 6, 7}), DataError);
    const auto xs = gpd_sample(kGpd1, 100, 1);
    GpdFitOptions bad;
    bad.fix_location = *std::min_element(xs.begin(), xs.end());
    CHECK_THROWS_AS(gpd_fit(xs, bad), DomainError);
  }

  TEST_CASE("alpha = 1 fit on the first reference parameters") {
    const auto xs = gpd_sample(kGpd1, 20000, 8080);
    GpdFitOptions opt;
    opt.fix_alpha = 1.0;
    const auto fit = gpd_fit(xs, opt);
    CHECK(fit.converged);
    CHECK(fit.params.alpha == 1.0);
    CHECK(fit.params.mu_loc < *std::min_element(xs.begin(), xs.end()));
    CHECK(rel_diff(fit.params.kappa, kGpd1.kappa) < 0.05);
    CHECK(rel_diff(fit.params.gamma, kGpd1.gamma) < 0.05);
    CHECK(gpd_log_likelihood(kGpd1, xs) <= fit.log_likelihood);
  }

  TEST_CASE("free alpha dominates the alpha = 1 fit") {
    const auto xs = gpd_sample(kGpd2, 20000, 9090);
    GpdFitOptions one;
    one.fix_alpha = 1.0;
    const auto constrained = gpd_fit(xs, one);
    GpdFitOptions free;
    free.extra_starts.push_back(constrained.params);
    const auto unconstrained = gpd_fit(xs, free);
    CHECK(unconstrained.converged);
    CHECK(unconstrained.log_likelihood >= constrained.log_likelihood);
    CHECK(gpd_log_likelihood(kGpd2, xs) <= unconstrained.log_likelihood);
  }

  TEST_CASE("fixed location mode") {
    const auto xs = gpd_sample(kGpd1, 3000, 4);
    GpdFitOptions opt;
    opt.fix_alpha = 1.0;
    opt.fix_location = 0.993;
    const auto fit = gpd_fit(xs, opt);
    CHECK(fit.params.mu_loc == 0.993);
    CHECK(fit.params.alpha == 1.0);
    CHECK(std::isfinite(fit.log_likelihood));
  }
}
