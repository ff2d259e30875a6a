// level_recurrence.hpp — exact expected level-set tables W_{i,l}(t), the
// geometric interval grid with its lower/upper bound rates, the bound series
// W^L/W^U, and coefficient extraction (exact convolution and LLT estimate).
#pragma once
#include <cstdint>
#include <vector>

#include "kth/errors.hpp"
#include "kth/graph_process.hpp"

namespace kth {

// ---------------------------------------------------------------- exact W

struct ExpectationTable {
    ModelKind model;
    int k;
    uint64_t s;      // root step (KTree >= 1; Apollonian 0 = from scratch)
    uint64_t t_max;
    int i_max;
    int lw;          // columns per level: k-1 (KTree) or k (Apollonian)
    int rows;        // levels present at t_max
    // values[t - s] is a row-major (rows_t x lw) snapshot; shorter early on.
    std::vector<std::vector<double>> values;

    double at(uint64_t t, int i, int l) const;
    double total(uint64_t t) const;
};

ExpectationTable exact_expectations(ModelKind model, int k, uint64_t s,
                                    uint64_t t_max, int i_max);

// Streaming variant: snapshots only at the requested times (ascending).
struct LevelSnapshot {
    uint64_t t;
    int rows;
    std::vector<double> w; // rows x lw
    double at(int i, int l, int lw) const {
        return (i < rows) ? w[(size_t)i * lw + (l - 1)] : 0.0;
    }
};

std::vector<LevelSnapshot> exact_snapshots(ModelKind model, int k, uint64_t s,
                                           const std::vector<uint64_t>& times,
                                           int i_max);

// ---------------------------------------------------------------- grid

struct IntervalGrid {
    uint64_t s, t;
    double omega;            // adjusted so m = log(t/s)/log(lambda0) is integer
    double lambda0;          // 1 + 1/omega
    int m;
    std::vector<uint64_t> points;  // s_0 .. s_m, strictly increasing, s_m = t
    double lambda1;          // lower rate: log lambda1 <= every interval harmonic sum
    double lambda_prime;     // upper rate: lambda0^a <= 1 + a*log(lambda') on (0,1]
    double log_lambda1;
    double log_lambda_prime;
};

IntervalGrid make_grid(uint64_t s, uint64_t t, double omega_hint);

// Harmonic sum over integers [a, b) computed via digamma (exact to ~1e-15).
double harmonic_sum(uint64_t a, uint64_t b);

// ---------------------------------------------------------------- bounds

struct BoundSeries {
    ModelKind model;
    int k;
    IntervalGrid grid;
    int lw;
    std::vector<int> rows_lower, rows_upper;       // per j
    std::vector<std::vector<double>> lower, upper; // [j] -> rows x lw

    double lower_at(int j, int i, int l) const;
    double upper_at(int j, int i, int l) const;
};

BoundSeries bound_series(ModelKind model, int k, const IntervalGrid& grid, int i_max);

struct SandwichReport {
    uint64_t cells = 0;
    uint64_t violations = 0;
    // first violation, for diagnostics
    int j = -1, i = -1, l = -1;
    double lo = 0, mid = 0, hi = 0;
};

// Compare bound_series against exact snapshots at every grid point.
SandwichReport check_sandwich(ModelKind model, int k, const IntervalGrid& grid, int i_max);

// ---------------------------------------------------------------- coefficients

// log [z^m] f(z)^N for m = 0..M, f(z) = prod_l 1/(1 - rates[l] z).
std::vector<double> gf_log_coefficients(int N, long M, const std::vector<double>& rates);

// [z^M] f(z)^N, exact DP oracle (k is redundant with rates.size()+1; checked).
double gf_coefficient_exact(int k, int N, long M, const std::vector<double>& rates);

struct LltResult {
    double estimate;
    double log_estimate;
    double x_hat;
    double mu;
    double sigma2;
};

LltResult llt_coefficient(int k, int N, long M, const std::vector<double>& rates);

enum class BoundKind { Lower, Upper };
enum class CoeffMode { Exact, Llt };

// Geometric-series rates of the closed-form generating function for the
// chosen bound; rates[l-1] is gamma_l.
std::vector<double> bound_rates(ModelKind model, int k, const IntervalGrid& grid,
                                BoundKind bound);

// Full prefactored coefficient w^L(m) / w^U(m) at (i = N, l = 2):
// closed-form constants times a coefficient of f(z)^N.
double level_coefficient(ModelKind model, int k, const IntervalGrid& grid, int N,
                         BoundKind bound, CoeffMode mode = CoeffMode::Exact);
double level_log_coefficient(ModelKind model, int k, const IntervalGrid& grid, int N,
                             BoundKind bound, CoeffMode mode = CoeffMode::Exact);

} // namespace kth
