#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "kth/errors.hpp"
#include "kth/yule.hpp"

using namespace kth;

TEST_CASE("yule pmf basics") {
    YuleParams p{3, 1.5};
    CHECK(yule_pmf(p, 3) == doctest::Approx(std::exp(-3.0 * 1.5)).epsilon(1e-12));
    CHECK_THROWS_AS(yule_pmf(p, 2), config_error);
    CHECK_THROWS_AS(yule_pmf({0, 1.0}, 1), config_error);
    // tau = 0 concentrates at theta
    CHECK(yule_pmf({2, 0.0}, 2) == 1.0);
    CHECK(yule_pmf({2, 0.0}, 5) == 0.0);
}

TEST_CASE("yule pmf normalization and mean on a lattice") {
    for (long theta : {1L, 2L, 5L, 10L})
        for (double tau : {0.25, 1.0, 2.0, 3.0}) {
            YuleParams p{theta, tau};
            CHECK(yule_normalization(p) == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(yule_mean(p) ==
                  doctest::Approx((double)theta * std::exp(tau)).epsilon(1e-6));
        }
}

TEST_CASE("yule sampler matches the closed form") {
    Xoshiro256 rng(7);
    CHECK(yule_sample({5, 0.0}, rng) == 5);

    YuleParams p{1, 1.0};
    const int n = 100000;
    std::vector<long> counts;
    for (int i = 0; i < n; ++i) {
        long v = yule_sample(p, rng);
        if ((size_t)v >= counts.size()) counts.resize(v + 1, 0);
        counts[v]++;
    }
    double tv = 0;
    for (size_t v = 1; v < counts.size(); ++v)
        tv += std::fabs((double)counts[v] / n - yule_pmf(p, (long)v));
    CHECK(tv * 0.5 < 0.01);

    // mean at theta=4, tau=2 within 3 standard errors of 4 e^2
    YuleParams q{4, 2.0};
    const int m = 50000;
    double sum = 0, sumsq = 0;
    for (int i = 0; i < m; ++i) {
        double v = (double)yule_sample(q, rng);
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / m;
    double var = sumsq / m - mean * mean;
    double se = std::sqrt(var / m);
    CHECK(std::fabs(mean - 4.0 * std::exp(2.0)) < 3 * se);
}

TEST_CASE("coupling sanity: tau = log(n/theta) gives mean population n") {
    Xoshiro256 rng(21);
    for (long theta : {1L, 10L})
        for (double n : {1e3, 1e5}) {
            YuleParams p{theta, std::log(n / (double)theta)};
            int reps = n > 1e4 ? 400 : 4000;
            double sum = 0, sumsq = 0;
            for (int i = 0; i < reps; ++i) {
                double v = (double)yule_sample(p, rng);
                sum += v;
                sumsq += v * v;
            }
            double mean = sum / reps;
            double var = sumsq / reps - mean * mean;
            double se = std::sqrt(var / reps);
            CHECK(std::fabs(mean - n) < 3 * se);
        }
}

TEST_CASE("multi-birth pmf") {
    CHECK(multi_birth_pmf(3, 2, 1.5, 0) ==
          doctest::Approx(std::exp(-3.0)).epsilon(1e-12));
    CHECK_THROWS_AS(multi_birth_pmf(1, 1, 1.0, 0), config_error);
    CHECK_THROWS_AS(multi_birth_pmf(3, 0, 1.0, 0), config_error);

    // k=2 collapses to the Yule law with theta = s, n = s + N
    for (long s : {1L, 3L})
        for (double t : {0.5, 2.0})
            for (long N : {0L, 1L, 4L, 10L})
                CHECK(multi_birth_pmf(2, s, t, N) ==
                      doctest::Approx(yule_pmf({s, t}, s + N)).epsilon(1e-12));

    for (int k : {3, 4})
        for (long s : {1L, 5L})
            for (double t : {0.5, 2.0})
                CHECK(multi_birth_normalization(k, s, t) ==
                      doctest::Approx(1.0).epsilon(1e-9));
}
