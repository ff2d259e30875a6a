// constants.hpp — solvers for the height constants: the growth factor
// Phi(k,a), its unit root a(k), the slope c(k), and the k=2 special case.
#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "kth/graph_process.hpp"

namespace kth {

struct ConstantsSolution {
    ModelKind model;
    int k;
    double a;
    double c;
    double phi_residual; // |Phi(k,a) - 1|
    double c_residual;   // |1/c - sum identity|
};

double phi_ktree(int k, double a);
double phi_apollonian(int k, double a);

// Unique a > 0 with Phi(k,a) = 1 (bisection, |Phi-1| < 1e-12).
double solve_a(ModelKind model, int k);
double c_from_a(ModelKind model, int k, double a);
ConstantsSolution solve_constants(ModelKind model, int k);

// k = 2: c solving (1/(2c)) exp(1 + 1/(2c)) = 1.
double solve_pittel();

// ceil(log t / (k log 2)), guarded against FP at exact integers.
long predict_height(int k, uint64_t t);

// mu(x) = sum gamma_l x/(1-gamma_l x); sigma^2 = mu + sum (gamma_l x)^2/(1-gamma_l x)^2.
std::pair<double, double> mu_sigma(int k, double x, const std::vector<double>& rates);

} // namespace kth
