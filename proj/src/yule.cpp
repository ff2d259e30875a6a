#include "kth/yule.hpp"

#include <cmath>

#include "kth/errors.hpp"

namespace kth {

static double log_binom(double n, double m) {
    return std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0);
}

double yule_log_pmf(const YuleParams& p, long n) {
    if (p.theta < 1 || p.tau < 0) throw config_error("yule: theta >= 1, tau >= 0");
    if (n < p.theta) throw config_error("yule pmf: n < theta");
    if (p.tau == 0.0) return n == p.theta ? 0.0 : -INFINITY;
    double births = (double)(n - p.theta);
    return log_binom((double)n - 1.0, births) - (double)p.theta * p.tau +
           births * std::log1p(-std::exp(-p.tau));
}

double yule_pmf(const YuleParams& p, long n) { return std::exp(yule_log_pmf(p, n)); }

long yule_sample(const YuleParams& p, Xoshiro256& rng) {
    if (p.theta < 1 || p.tau < 0) throw config_error("yule: theta >= 1, tau >= 0");
    double t = 0.0;
    long n = p.theta;
    for (;;) {
        double wait = -std::log(rng.uniform01()) / (double)n; // Exp(n)
        if (t + wait > p.tau) return n;
        t += wait;
        ++n;
    }
}

// the sums below extend until the tail term < 1e-15 * running total

double yule_normalization(const YuleParams& p) {
    double total = 0.0;
    for (long n = p.theta;; ++n) {
        double term = yule_pmf(p, n);
        total += term;
        if (n > p.theta && term < 1e-15 * total) break;
        if (n > p.theta + 100000000L) throw invariant_error("yule normalization did not converge");
    }
    return total;
}

double yule_mean(const YuleParams& p) {
    double total = 0.0;
    for (long n = p.theta;; ++n) {
        double term = (double)n * yule_pmf(p, n);
        total += term;
        if (n > p.theta && term < 1e-15 * total) break;
        if (n > p.theta + 100000000L) throw invariant_error("yule mean did not converge");
    }
    return total;
}

double multi_birth_pmf(int k, long s, double t, long N) {
    // k = 2 degenerates to the plain Yule law; accepted for cross-checks
    if (k < 2 || s < 1 || t < 0 || N < 0)
        throw config_error("multi_birth: k >= 2, s >= 1, t >= 0, N >= 0");
    double lp = -(double)s * t;
    if (N > 0) {
        if (t == 0.0) return 0.0;
        for (long i = 1; i <= N; ++i)
            lp += std::log(((double)(k - 1) * (i - 1) + (double)s) /
                           ((double)(k - 1) * i));
        lp += (double)N * std::log1p(-std::exp(-(double)(k - 1) * t));
    }
    return std::exp(lp);
}

double multi_birth_normalization(int k, long s, double t) {
    double total = 0.0;
    for (long N = 0;; ++N) {
        double term = multi_birth_pmf(k, s, t, N);
        total += term;
        if (N > 0 && term < 1e-15 * total) break;
        if (N > 100000000L) throw invariant_error("multi_birth normalization did not converge");
    }
    return total;
}

} // namespace kth
