// yule.hpp — pure-birth (Yule) population law and sampler, plus the
// multi-birth step distribution; used as validation distributions.
#pragma once
#include <cstdint>

#include "kth/rng.hpp"

namespace kth {

struct YuleParams {
    long theta; // initial population >= 1
    double tau; // elapsed time >= 0
};

// P(population = n at time tau | started at theta) = C(n-1, n-theta) e^{-theta tau} (1-e^{-tau})^{n-theta}
double yule_log_pmf(const YuleParams& p, long n);
double yule_pmf(const YuleParams& p, long n);

// Exponential clocks: rate-n waiting times until total time exceeds tau.
long yule_sample(const YuleParams& p, Xoshiro256& rng);

// Adaptive-truncation sums (extend until tail term < 1e-15 * running total).
double yule_normalization(const YuleParams& p);
double yule_mean(const YuleParams& p);

// p_N(t) = prod_{i=1..N} ((k-1)(i-1)+s)/((k-1)i) * e^{-st} (1-e^{-(k-1)t})^N
double multi_birth_pmf(int k, long s, double t, long N);
double multi_birth_normalization(int k, long s, double t);

} // namespace kth
