#include "kth/constants.hpp"

#include <cmath>

#include "kth/errors.hpp"

namespace kth {

// Both Phi forms are products of k-ish factors times exp of a harmonic-type
// sum; evaluated in log space so large k stays finite.
static double log_phi(ModelKind model, int k, double a) {
    if (!(a > 0)) throw config_error("phi requires a > 0");
    if (k < 3) throw config_error("phi requires k >= 3");
    double lp = 0.0;
    if (model == ModelKind::KTree) {
        for (int l = 1; l <= k - 1; ++l) lp += std::log((double)l);  // (k-1)!
        for (int l = 0; l <= k - 2; ++l) lp -= std::log(k * a + l);
        for (int l = 0; l <= k - 2; ++l) lp += (k * a + k - 1) / (l + a * k);
    } else {
        for (int l = 2; l <= k; ++l) lp += std::log((double)l);      // k!
        for (int l = 0; l <= k - 1; ++l) lp -= std::log(a * (k - 1) + l);
        for (int l = 0; l <= k - 1; ++l)
            lp += ((double)(k - 1) * (a + 1.0) - 1.0) / (l + a * (k - 1));
    }
    return lp;
}

double phi_ktree(int k, double a) { return std::exp(log_phi(ModelKind::KTree, k, a)); }
double phi_apollonian(int k, double a) {
    return std::exp(log_phi(ModelKind::Apollonian, k, a));
}

double solve_a(ModelKind model, int k) {
    double lo = 1e-4, hi = 64.0;
    if (!(log_phi(model, k, lo) > 0.0 && log_phi(model, k, hi) < 0.0))
        throw invariant_error("phi root bracket failure");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (log_phi(model, k, mid) > 0.0 ? lo : hi) = mid;
    }
    double a = 0.5 * (lo + hi);
    if (std::fabs(std::exp(log_phi(model, k, a)) - 1.0) > 1e-12)
        throw invariant_error("phi root did not converge to tolerance");
    return a;
}

double c_from_a(ModelKind model, int k, double a) {
    double inv = 0.0;
    if (model == ModelKind::KTree) {
        for (int l = 0; l <= k - 2; ++l) inv += (double)k / (l + a * k);
    } else {
        for (int l = 0; l <= k - 1; ++l) inv += (double)(k - 1) / (l + a * (k - 1));
    }
    return 1.0 / inv;
}

ConstantsSolution solve_constants(ModelKind model, int k) {
    ConstantsSolution sol;
    sol.model = model;
    sol.k = k;
    sol.a = solve_a(model, k);
    sol.c = c_from_a(model, k, sol.a);
    sol.phi_residual = std::fabs(std::exp(log_phi(model, k, sol.a)) - 1.0);
    double inv = 0.0;
    if (model == ModelKind::KTree) {
        for (int l = 0; l <= k - 2; ++l) inv += 1.0 / (l + sol.a * k);
        sol.c_residual = std::fabs(1.0 / (k * sol.c) - inv);
    } else {
        for (int l = 0; l <= k - 1; ++l) inv += 1.0 / (l + sol.a * (k - 1));
        sol.c_residual = std::fabs(1.0 / ((k - 1) * sol.c) - inv);
    }
    return sol;
}

double solve_pittel() {
    // x e^x = e^{-1} with x = 1/(2c)
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (mid * std::exp(mid) < std::exp(-1.0) ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    return 1.0 / (2.0 * x);
}

long predict_height(int k, uint64_t t) {
    if (k < 2 || t < 2) throw config_error("predict_height requires k >= 2, t >= 2");
    double r = std::log((double)t) / ((double)k * std::log(2.0));
    // snap exact powers of 2^k: ceil must not be tipped by the last ulp
    double nearest = std::round(r);
    if (std::fabs(r - nearest) < 1e-9) return (long)nearest;
    return (long)std::ceil(r);
}

std::pair<double, double> mu_sigma(int k, double x, const std::vector<double>& rates) {
    (void)k;
    double mu = 0.0, s2 = 0.0;
    for (double g : rates) {
        double gx = g * x;
        if (!(gx < 1.0)) throw config_error("mu_sigma: x at or beyond singularity 1/max rate");
        mu += gx / (1.0 - gx);
        s2 += gx * gx / ((1.0 - gx) * (1.0 - gx));
    }
    return {mu, mu + s2};
}

} // namespace kth
