#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "gbias/distributions.hpp"
#include "gbias/error.hpp"
#include "gbias/gof.hpp"
#include "oracles.hpp"

using namespace gbias;

namespace {

std::vector<double> midpoint_quantiles(const LogNormalParams& p, std::size_t n) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i)
    xs[i] = lognormal_quantile(p, (static_cast<double>(i) + 0.5) / static_cast<double>(n));
  return xs;
}

GofOptions quick(std::uint64_t seed, std::size_t replicates = 200) {
  GofOptions o;
  o.boot.replicates = replicates;
  o.boot.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("star thresholds") {
  CHECK(stars_for(0.0) == Stars::kThree);
  CHECK(stars_for(0.0099) == Stars::kThree);
  CHECK(stars_for(0.01) == Stars::kTwo);
  CHECK(stars_for(0.0299) == Stars::kTwo);
  CHECK(stars_for(0.03) == Stars::kOne);
  CHECK(stars_for(0.0499) == Stars::kOne);
  CHECK(stars_for(0.05) == Stars::kNone);
  CHECK(stars_for(1.0) == Stars::kNone);
  CHECK(to_string(Stars::kTwo) == "**");
  CHECK(parse_method("chi2") == GofMethod::kChi2);
  CHECK_THROWS_AS(parse_method("cvm"), DomainError);
}

TEST_SUITE("ks") {
  TEST_CASE("midpoint construction gives half a step") {
    const LogNormalParams p{0.4, 1.3};
    for (std::size_t n : {1u, 7u, 300u})
      CHECK(ks_statistic(midpoint_quantiles(p, n), p) == doctest::Approx(0.5 / n).epsilon(1e-10));
    CHECK(ks_statistic(std::vector<double>{std::exp(0.4)}, p) == doctest::Approx(0.5).epsilon(1e-14));
  }

  TEST_CASE("sample from the tested law") {
    const LogNormalParams p{1.0, 0.8};
    CHECK(ks_statistic(lognormal_sample(p, 300, 555), p) < 0.10);
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(ks_statistic(std::vector<double>{}, {0.0, 1.0}), DataError);
    CHECK_THROWS_AS(ks_statistic(std::vector<double>{1.0, -1.0}, {0.0, 1.0}), DataError);
  }
}

TEST_SUITE("chi2") {
  TEST_CASE("perfectly balanced bins give zero") {
    const LogNormalParams p{0.0, 1.0};
    // 15 points at the centre of each of 20 equal-probability bins.
    std::vector<double> xs;
    for (int k = 0; k < 20; ++k)
      for (int j = 0; j < 15; ++j) xs.push_back(lognormal_quantile(p, (k + 0.5) / 20.0));
    const auto s = chi2_statistic(xs, p, 20);
    CHECK(s.statistic == 0.0);
    CHECK(s.dof == 17);
  }

  TEST_CASE("two bins leave no degrees of freedom") {
    // Hand arithmetic for observed {10, 20} with expectation 15 each.
    CHECK(oracle::chi2_by_edges({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3,
                                 3, 3, 3, 3, 3, 3, 3, 3, 3, 3},
                                {2.0}) == doctest::Approx(10.0 / 3.0));
    const auto xs = lognormal_sample({0.0, 1.0}, 30, 1);
    CHECK_THROWS_AS(chi2_statistic(xs, {0.0, 1.0}, 2), DomainError);
    CHECK_THROWS_AS(chi2_statistic(xs, {0.0, 1.0}, 7), DataError);
  }

  TEST_CASE("null sample within the central 99% of chi2(17)") {
    const LogNormalParams p{0.2, 0.6};
    const auto s = chi2_statistic(lognormal_sample(p, 300, 2718), p, 20);
    const boost::math::chi_squared_distribution<double> law(17);
    CHECK(s.statistic > boost::math::quantile(law, 0.005));
    CHECK(s.statistic < boost::math::quantile(law, 0.995));
  }

  TEST_CASE("brute-force recount") {
    std::mt19937_64 gen(50);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int c = 0; c < 50; ++c) {
      const LogNormalParams truth{unif(gen) * 4 - 2, 0.2 + unif(gen) * 2};
      const LogNormalParams tested{truth.mu + 0.3 * (unif(gen) - 0.5), truth.sigma * (0.8 + 0.4 * unif(gen))};
      const std::size_t bins = 3 + static_cast<std::size_t>(unif(gen) * 20);
      const std::size_t n = 5 * bins + static_cast<std::size_t>(unif(gen) * 400);
      const auto xs = lognormal_sample(truth, n, 1000 + c);
      std::vector<double> edges;
      for (std::size_t k = 1; k < bins; ++k)
        edges.push_back(lognormal_quantile(tested, static_cast<double>(k) / static_cast<double>(bins)));
      CHECK(chi2_statistic(xs, tested, bins).statistic ==
            doctest::Approx(oracle::chi2_by_edges(xs, edges)).epsilon(1e-12));
    }
  }
}

TEST_SUITE("ad") {
  TEST_CASE("midpoint construction is small") {
    const LogNormalParams p{0.0, 1.0};
    const auto a = ad_statistic(midpoint_quantiles(p, 100), p);
    CHECK(a.value < 0.05);
    CHECK(a.value > 0.0);
    CHECK_FALSE(a.clipped);
  }

  TEST_CASE("sample above the 99.99% quantile blows up") {
    const LogNormalParams p{0.0, 1.0};
    const double q = lognormal_quantile(p, 0.9999);
    std::vector<double> xs;
    for (int i = 0; i < 300; ++i) xs.push_back(q * (1.0 + 0.01 * i));
    const auto a = ad_statistic(xs, p);
    CHECK(a.value > 50.0);

    // Far enough out that F rounds to 1.
    std::vector<double> far(300, std::exp(12.0));
    const auto clipped = ad_statistic(far, p);
    CHECK(clipped.clipped);
    CHECK(std::isfinite(clipped.value));
    CHECK(clipped.value > 50.0);
    CHECK_THROWS_AS(ad_statistic(far, p, AdClipping::kStrict), DataError);
  }
}

TEST_SUITE("invariances") {
  TEST_CASE("statistics ignore the order of the sample") {
    std::mt19937_64 gen(9);
    for (int c = 0; c < 100; ++c) {
      auto xs = lognormal_sample({0.5, 1.1}, 100 + c, 3000 + c);
      const auto fit = lognormal_fit(xs).params;
      const double ks = ks_statistic(xs, fit);
      const double ad = ad_statistic(xs, fit).value;
      const double chi = chi2_statistic(xs, fit, 10).statistic;
      std::shuffle(xs.begin(), xs.end(), gen);
      CHECK(ks_statistic(xs, fit) == ks);
      CHECK(ad_statistic(xs, fit).value == ad);
      CHECK(chi2_statistic(xs, fit, 10).statistic == chi);
    }
  }

  TEST_CASE("KS and AD are scale invariant after refitting") {
    for (int c = 0; c < 100; ++c) {
      const auto xs = lognormal_sample({0.1 * c - 3.0, 0.3 + 0.02 * c}, 300, 4000 + c);
      std::vector<double> scaled(xs);
      for (double& x : scaled) x *= 7.0;
      const auto f1 = lognormal_fit(xs).params;
      const auto f7 = lognormal_fit(scaled).params;
      CHECK(std::abs(ks_statistic(xs, f1) - ks_statistic(scaled, f7)) < 1e-10);
      CHECK(std::abs(ad_statistic(xs, f1).value - ad_statistic(scaled, f7).value) < 1e-10);
    }
  }
}

TEST_SUITE("gof_test") {
  TEST_CASE("configuration errors") {
    const auto xs = lognormal_sample({0.0, 1.0}, 300, 1);
    GofOptions o = quick(1, 99);
    CHECK_THROWS_AS(gof_test(xs, GofMethod::kKs, o), DomainError);
    const auto small = lognormal_sample({0.0, 1.0}, 19, 1);
    CHECK_THROWS_AS(gof_test(small, GofMethod::kAd, quick(1)), DataError);
    CHECK_NOTHROW(gof_test(lognormal_sample({0.0, 1.0}, 20, 1), GofMethod::kChi2, quick(1)));
  }

  TEST_CASE("result fields") {
    const auto xs = lognormal_sample({0.0, 1.0}, 300, 77);
    const auto all = gof_test_all(xs, quick(5));
    for (std::size_t m = 0; m < 3; ++m) {
      const GofResult& r = all[m];
      CHECK(r.method == kAllMethods[m]);
      CHECK(r.n == 300);
      CHECK(r.statistic >= 0.0);
      CHECK(r.p_value >= 1.0 / 201.0);
      CHECK(r.p_value <= 1.0);
      CHECK(r.stars == stars_for(r.p_value));
      const GofResult single = gof_test(xs, r.method, quick(5));
      CHECK(single.p_value == r.p_value);
      CHECK(single.statistic == r.statistic);
    }
    CHECK(all[1].dof == 17);
    CHECK(gof_test_all(xs, quick(5))[2].p_value == all[2].p_value);
  }

  TEST_CASE("add-one estimator never returns zero") {
    // Far from log-normal: two clusters.
    std::vector<double> xs;
    for (int i = 0; i < 150; ++i) xs.push_back(1.0 + 1e-3 * i);
    for (int i = 0; i < 150; ++i) xs.push_back(1000.0 + 1e-1 * i);
    for (const GofResult& r : gof_test_all(xs, quick(3)))
      CHECK(r.p_value == doctest::Approx(1.0 / 201.0));
  }

  TEST_CASE("null samples rarely reach the 1% level") {
    // P(p <= 0.01) is about 1% under the null; allow a binomial 3-sigma band.
    std::array<int, 3> low{};
    for (int run = 0; run < 100; ++run) {
      const auto xs = lognormal_sample({1.0, 0.5}, 300, 9000 + run);
      const auto res = gof_test_all(xs, quick(100 + run));
      for (std::size_t m = 0; m < 3; ++m) low[m] += res[m].p_value <= 0.01;
    }
    for (int c : low) CHECK(c <= 4);
  }

  TEST_CASE("GPD-shaped samples are rejected well above the nominal rate") {
    // AD power at n = 300 is about 40% for these parameters; 14% is the
    // binomial 3-sigma ceiling of a 5% level test over 50 runs.
    const GpdParams g{18.82, 1.0, 0.385, 0.993};
    int rejected = 0;
    for (int run = 0; run < 50; ++run) {
      const auto xs = gpd_sample(g, 300, 7000 + run);
      rejected += gof_test(xs, GofMethod::kAd, quick(run)).p_value < 0.05;
    }
    CHECK(rejected >= 7);
  }

  TEST_CASE("asymptotic mode") {
    CHECK(kolmogorov_survival(1.358) == doctest::Approx(0.05).epsilon(0.01));
    CHECK(kolmogorov_survival(1.628) == doctest::Approx(0.01).epsilon(0.02));
    CHECK(kolmogorov_survival(0.5) == doctest::Approx(0.9639).epsilon(1e-3));
    CHECK(anderson_darling_asymptotic_cdf(2.492) == doctest::Approx(0.95).epsilon(1e-3));
    CHECK(anderson_darling_asymptotic_cdf(3.857) == doctest::Approx(0.99).epsilon(1e-3));

    const auto xs = lognormal_sample({0.0, 1.0}, 300, 3);
    GofOptions o;
    o.mode = PValueMode::kAsymptotic;
    o.boot.replicates = 0;  // unused
    for (const GofResult& r : gof_test_all(xs, o)) {
      CHECK(r.p_value > 0.0);
      CHECK(r.p_value <= 1.0);
    }
  }
}
