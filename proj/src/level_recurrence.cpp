#include "kth/level_recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kth {

static constexpr double NEG_INF = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------- exact W
//
// One forward Euler pass of the exact expectation recurrences, in place.
// Rows are processed from the deepest level down to 0; within a row, columns
// l = 1..lw-1 ascending and the inflow column last, so every right-hand side
// reads pre-step values.
namespace {

struct ExactStepper {
    ModelKind model;
    int k, lw, i_max;
    std::vector<double> w; // rows x lw, row-major, column index l-1
    int rows = 1;

    ExactStepper(ModelKind model_, int k_, int i_max_, double root_mass)
        : model(model_), k(k_),
          lw(model_ == ModelKind::KTree ? k_ - 1 : k_),
          i_max(i_max_), w((size_t)lw, 0.0) {
        w[0] = root_mass; // (i=0, l=1)
    }

    double& at(int i, int l) { return w[(size_t)i * lw + (l - 1)]; }

    void grow_if_needed(double inflow_from_top) {
        if (inflow_from_top <= 0.0) return;
        if (rows > i_max)
            throw invariant_error("level cap i_max=" + std::to_string(i_max) +
                                  " exceeded in exact recurrence");
        w.resize((size_t)(rows + 1) * lw, 0.0);
        ++rows;
    }

    void advance(uint64_t t) {
        if (model == ModelKind::KTree) {
            double inv = 1.0 / ((double)k * (double)t);
            // promotion (rows-1,1) -> (rows, k-1)
            grow_if_needed(at(rows - 1, 1) * inv);
            for (int i = rows - 1; i >= 0; --i) {
                double* row = &w[(size_t)i * lw];
                for (int l = 1; l <= k - 2; ++l)
                    row[l - 1] += (double)(k - l) * inv * row[l - 1] +
                                  (double)(l + 1) * inv * row[l];
                double in = (i > 0) ? at(i - 1, 1) * inv : 0.0;
                row[k - 2] += inv * row[k - 2] + in;
            }
        } else {
            double inv = 1.0 / ((double)(k - 1) * (double)t + 1.0);
            grow_if_needed(at(rows - 1, 1) * inv);
            for (int i = rows - 1; i >= 0; --i) {
                double* row = &w[(size_t)i * lw];
                for (int l = 1; l <= k - 1; ++l)
                    row[l - 1] += (double)(k - l - 1) * inv * row[l - 1] +
                                  (double)(l + 1) * inv * row[l];
                double in = (i > 0) ? at(i - 1, 1) * inv : 0.0;
                row[k - 1] += -inv * row[k - 1] + in;
            }
        }
    }
};

double root_mass(ModelKind model, int k, uint64_t s) {
    if (model == ModelKind::KTree) return (double)s;
    return s == 0 ? 1.0 : (double)(k - 1) * (double)s + 1.0;
}

} // namespace

double ExpectationTable::at(uint64_t t, int i, int l) const {
    const auto& snap = values.at(t - s);
    int r = (int)(snap.size() / lw);
    if (i >= r) return 0.0;
    return snap[(size_t)i * lw + (l - 1)];
}

double ExpectationTable::total(uint64_t t) const {
    const auto& snap = values.at(t - s);
    double acc = 0;
    for (double v : snap) acc += v;
    return acc;
}

ExpectationTable exact_expectations(ModelKind model, int k, uint64_t s,
                                    uint64_t t_max, int i_max) {
    if (model == ModelKind::KTree && s < 1)
        throw config_error("ktree recurrence requires s >= 1");
    if (t_max < s) throw config_error("t_max < s");
    if (i_max < 1) throw config_error("i_max must be >= 1");
    ExactStepper st(model, k, i_max, root_mass(model, k, s));
    ExpectationTable out;
    out.model = model;
    out.k = k;
    out.s = s;
    out.t_max = t_max;
    out.i_max = i_max;
    out.lw = st.lw;
    out.values.reserve(t_max - s + 1);
    out.values.push_back(st.w);
    for (uint64_t t = s; t < t_max; ++t) {
        st.advance(t);
        out.values.push_back(st.w);
    }
    out.rows = st.rows;
    return out;
}

std::vector<LevelSnapshot> exact_snapshots(ModelKind model, int k, uint64_t s,
                                           const std::vector<uint64_t>& times,
                                           int i_max) {
    if (model == ModelKind::KTree && s < 1)
        throw config_error("ktree recurrence requires s >= 1");
    if (i_max < 1) throw config_error("i_max must be >= 1");
    std::vector<LevelSnapshot> out;
    ExactStepper st(model, k, i_max, root_mass(model, k, s));
    uint64_t t = s;
    size_t next = 0;
    while (next < times.size() && times[next] == t) {
        out.push_back({t, st.rows, st.w});
        ++next;
    }
    while (next < times.size()) {
        if (times[next] < t) throw config_error("snapshot times must be ascending and >= s");
        st.advance(t);
        ++t;
        while (next < times.size() && times[next] == t) {
            out.push_back({t, st.rows, st.w});
            ++next;
        }
    }
    return out;
}

// ---------------------------------------------------------------- grid

static double digamma(double x) {
    double r = 0.0;
    while (x < 10.0) {
        r -= 1.0 / x;
        x += 1.0;
    }
    double f = 1.0 / (x * x);
    r += std::log(x) - 0.5 / x -
         f * (1.0 / 12 - f * (1.0 / 120 - f * (1.0 / 252 - f * (1.0 / 240 - f / 132))));
    return r;
}

double harmonic_sum(uint64_t a, uint64_t b) {
    if (b <= a) return 0.0;
    if (b - a < 64) {
        double acc = 0;
        for (uint64_t v = a; v < b; ++v) acc += 1.0 / (double)v;
        return acc;
    }
    return digamma((double)b) - digamma((double)a);
}

IntervalGrid make_grid(uint64_t s, uint64_t t, double omega_hint) {
    if (!(s > 1 && s < t)) throw config_error("grid requires 1 < s < t");
    if (!(omega_hint > 0)) throw config_error("omega hint must be positive");
    double R = std::log((double)t / (double)s);
    int m = (int)std::llround(R / std::log1p(1.0 / omega_hint));
    if (m < 1) throw config_error("degenerate grid (m < 1)");
    double loglam0 = R / m;
    IntervalGrid g;
    g.s = s;
    g.t = t;
    g.lambda0 = std::exp(loglam0);
    g.omega = 1.0 / (g.lambda0 - 1.0);
    g.m = m;
    g.points.resize(m + 1);
    g.points[0] = s;
    for (int j = 1; j <= m; ++j) {
        double v = (double)s * std::exp(loglam0 * j);
        uint64_t p = (uint64_t)std::ceil(v * (1.0 - 1e-12));
        if (p <= g.points[j - 1]) p = g.points[j - 1] + 1; // keep strictly increasing
        g.points[j] = p;
    }
    if (g.points[m - 1] >= t) throw config_error("degenerate grid (interval collapsed at t)");
    g.points[m] = t;
    double hmin = std::numeric_limits<double>::infinity(), hmax = 0.0;
    for (int j = 0; j < m; ++j) {
        double h = harmonic_sum(g.points[j], g.points[j + 1]);
        // shifted sum over (s_j, s_{j+1}]: lower rate stays valid when the
        // per-step denominators sit one past the step index
        double hs = h - 1.0 / (double)g.points[j] + 1.0 / (double)g.points[j + 1];
        hmin = std::min({hmin, h, hs});
        hmax = std::max(hmax, h);
    }
    g.log_lambda1 = std::min(loglam0, hmin);
    // least L with lambda0^a <= 1 + a*L on (0,1]: (e^{aH}-1)/a is maximized at
    // a=1, so L = e^{max interval sum} - 1 keeps every interval bounded above.
    g.log_lambda_prime = std::exp(std::max(loglam0, hmax)) - 1.0;
    g.lambda1 = std::exp(g.log_lambda1);
    g.lambda_prime = std::exp(g.log_lambda_prime);
    return g;
}

// ---------------------------------------------------------------- bounds

double BoundSeries::lower_at(int j, int i, int l) const {
    if (i >= rows_lower[j]) return 0.0;
    return lower[j][(size_t)i * lw + (l - 1)];
}
double BoundSeries::upper_at(int j, int i, int l) const {
    if (i >= rows_upper[j]) return 0.0;
    return upper[j][(size_t)i * lw + (l - 1)];
}

BoundSeries bound_series(ModelKind model, int k, const IntervalGrid& grid, int i_max) {
    if (i_max < 1) throw config_error("i_max must be >= 1");
    const int lw = (model == ModelKind::KTree) ? k - 1 : k;
    const double L1 = grid.log_lambda1, Lp = grid.log_lambda_prime;
    const double kk = (model == ModelKind::KTree) ? (double)k : (double)(k - 1);

    BoundSeries out;
    out.model = model;
    out.k = k;
    out.grid = grid;
    out.lw = lw;

    std::vector<double> lo((size_t)lw, 0.0), up((size_t)lw, 0.0);
    lo[0] = up[0] = 1.0;
    int rl = 1, ru = 1;
    out.lower.push_back(lo);
    out.upper.push_back(up);
    out.rows_lower.push_back(rl);
    out.rows_upper.push_back(ru);

    auto cell = [lw](std::vector<double>& v, int i, int l) -> double& {
        return v[(size_t)i * lw + (l - 1)];
    };
    auto read = [lw](const std::vector<double>& v, int rows, int i, int l) {
        return (i < rows) ? v[(size_t)i * lw + (l - 1)] : 0.0;
    };

    for (int j = 0; j < grid.m; ++j) {
        // --- lower: all right-hand sides at step j
        int nrl = rl;
        if (read(lo, rl, rl - 1, 1) * L1 / kk > 0.0) {
            if (rl > i_max) throw invariant_error("level cap i_max exceeded in bound series");
            nrl = rl + 1;
        }
        std::vector<double> nlo((size_t)nrl * lw, 0.0);
        cell(nlo, 0, 1) = lo[0] * (1.0 + (kk - 1.0) / kk * L1);
        for (int i = 1; i < nrl; ++i) {
            if (model == ModelKind::KTree) {
                cell(nlo, i, k - 1) = read(lo, rl, i, k - 1) * (1.0 + L1 / kk) +
                                      read(lo, rl, i - 1, 1) * L1 / kk;
                for (int l = k - 2; l >= 1; --l)
                    cell(nlo, i, l) = read(lo, rl, i, l) * (1.0 + (double)(k - l) / kk * L1) +
                                      read(lo, rl, i, l + 1) * (double)(l + 1) / kk * L1;
            } else {
                cell(nlo, i, k) = read(lo, rl, i, k) * (1.0 - L1 / kk) +
                                  read(lo, rl, i - 1, 1) * L1 / kk;
                for (int l = k - 1; l >= 1; --l)
                    cell(nlo, i, l) = read(lo, rl, i, l) * (1.0 + (double)(k - l - 1) / kk * L1) +
                                      read(lo, rl, i, l + 1) * (double)(l + 1) / kk * L1;
            }
        }
        lo.swap(nlo);
        rl = nrl;

        // --- upper: inflow terms read step j+1 values; resolve by walking i
        // upward and l downward (triangular dependency).  One step can seed
        // arbitrarily deep rows; extend until the cascade underflows to 0.
        std::vector<double> nup((size_t)lw, 0.0);
        int nru = 1;
        cell(nup, 0, 1) = up[0] * (1.0 + (kk - 1.0) / kk * Lp);
        for (int i = 1;; ++i) {
            double seed = cell(nup, i - 1, 1) * Lp / kk;
            if (i >= ru && seed <= 0.0) break; // no old mass, no inflow
            if (i > i_max)
                throw invariant_error("level cap i_max exceeded in bound series");
            nup.resize((size_t)(i + 1) * lw, 0.0);
            nru = i + 1;
            if (model == ModelKind::KTree) {
                cell(nup, i, k - 1) = read(up, ru, i, k - 1) * (1.0 + Lp / kk) + seed;
                for (int l = k - 2; l >= 1; --l)
                    cell(nup, i, l) = read(up, ru, i, l) * (1.0 + (double)(k - l) / kk * Lp) +
                                      cell(nup, i, l + 1) * (double)(l + 1) / kk * Lp;
            } else {
                cell(nup, i, k) = read(up, ru, i, k) + seed;
                for (int l = k - 1; l >= 1; --l)
                    cell(nup, i, l) = read(up, ru, i, l) * (1.0 + (double)(k - l - 1) / kk * Lp) +
                                      cell(nup, i, l + 1) * (double)(l + 1) / kk * Lp;
            }
            bool rowzero = true;
            for (int l = 1; l <= lw; ++l)
                if (cell(nup, i, l) > 0.0) { rowzero = false; break; }
            if (rowzero && i >= ru - 1) { // nothing deeper can appear either
                nup.resize((size_t)i * lw);
                nru = i;
                break;
            }
        }
        up.swap(nup);
        ru = nru;

        out.lower.push_back(lo);
        out.upper.push_back(up);
        out.rows_lower.push_back(rl);
        out.rows_upper.push_back(ru);
    }
    return out;
}

SandwichReport check_sandwich(ModelKind model, int k, const IntervalGrid& grid, int i_max) {
    BoundSeries bs = bound_series(model, k, grid, i_max);
    std::vector<LevelSnapshot> snaps =
        exact_snapshots(model, k, grid.s, grid.points, i_max);
    if ((int)snaps.size() != grid.m + 1)
        throw invariant_error("snapshot count mismatch against grid");
    const int lw = bs.lw;
    const double norm = root_mass(model, k, grid.s);
    SandwichReport rep;
    // slack: 1e6 accumulation steps of rounding plus underflow at deep levels
    const double rel = 1e-9, abs_slack = 1e-280;
    for (int j = 0; j <= grid.m; ++j) {
        int rows = std::max({snaps[j].rows, bs.rows_lower[j], bs.rows_upper[j]});
        for (int i = 0; i < rows; ++i) {
            for (int l = 1; l <= lw; ++l) {
                double w = snaps[j].at(i, l, lw) / norm;
                double lov = bs.lower_at(j, i, l);
                double hiv = bs.upper_at(j, i, l);
                ++rep.cells;
                bool bad = lov > w * (1.0 + rel) + abs_slack ||
                           w > hiv * (1.0 + rel) + abs_slack;
                if (bad) {
                    if (rep.violations == 0) {
                        rep.j = j; rep.i = i; rep.l = l;
                        rep.lo = lov; rep.mid = w; rep.hi = hiv;
                    }
                    ++rep.violations;
                }
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------- coefficients

static inline double logaddexp(double a, double b) {
    if (a == NEG_INF) return b;
    if (b == NEG_INF) return a;
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

std::vector<double> gf_log_coefficients(int N, long M, const std::vector<double>& rates) {
    if (N < 1 || M < 0) throw config_error("gf coefficients require N >= 1, M >= 0");
    if (N > 200 || M > 20000) throw config_error("gf budget exceeded (N <= 200, M <= 20000)");
    for (double g : rates)
        if (!(g > 0)) throw config_error("gf rates must be positive");
    std::vector<double> c((size_t)M + 1, NEG_INF);
    c[0] = 0.0;
    // multiply by (1 - g z)^{-1} N times per rate: in-place prefix pass
    for (double g : rates) {
        double lg = std::log(g);
        for (int rep = 0; rep < N; ++rep)
            for (long mm = 1; mm <= M; ++mm)
                c[mm] = logaddexp(c[mm], lg + c[mm - 1]);
    }
    return c;
}

double gf_coefficient_exact(int k, int N, long M, const std::vector<double>& rates) {
    if (k >= 2 && rates.size() != (size_t)(k - 1) && rates.size() != (size_t)k)
        throw config_error("rates count inconsistent with k");
    return std::exp(gf_log_coefficients(N, M, rates).back());
}

LltResult llt_coefficient(int k, int N, long M, const std::vector<double>& rates) {
    (void)k;
    if (N < 1 || M < 1) throw config_error("llt requires N >= 1, M >= 1");
    double gmax = 0;
    for (double g : rates) gmax = std::max(gmax, g);
    if (!(gmax > 0)) throw config_error("llt rates must be positive");
    double target = (double)M / (double)N;
    auto mu = [&](double x) {
        double acc = 0;
        for (double g : rates) acc += g * x / (1.0 - g * x);
        return acc;
    };
    double lox = 0.0, hix = (1.0 - 1e-15) / gmax;
    if (mu(hix) < target)
        throw invariant_error("llt bracket failure: M/N outside the range of mu");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lox + hix);
        (mu(mid) < target ? lox : hix) = mid;
    }
    double x = 0.5 * (lox + hix);
    double m1 = mu(x), s2 = m1;
    double logf = 0.0;
    for (double g : rates) {
        double gx = g * x;
        s2 += gx * gx / ((1.0 - gx) * (1.0 - gx));
        logf -= std::log1p(-gx);
    }
    LltResult r;
    r.x_hat = x;
    r.mu = m1;
    r.sigma2 = s2;
    r.log_estimate = (double)N * logf - (double)M * std::log(x) -
                     0.5 * std::log(2.0 * M_PI * s2 * (double)N);
    r.estimate = std::exp(r.log_estimate);
    return r;
}

std::vector<double> bound_rates(ModelKind model, int k, const IntervalGrid& grid,
                                BoundKind bound) {
    double L = (bound == BoundKind::Lower) ? grid.log_lambda1 : grid.log_lambda_prime;
    std::vector<double> rates;
    if (model == ModelKind::KTree) {
        for (int l = 1; l <= k - 1; ++l)
            rates.push_back(1.0 + (double)(k - l) / k * L);
    } else {
        for (int l = 1; l <= k - 1; ++l)
            rates.push_back(1.0 + (double)(k - l - 1) / (k - 1) * L);
        // l = k: lower decays, upper is frozen at 1
        rates.push_back(bound == BoundKind::Lower ? 1.0 - L / (k - 1) : 1.0);
    }
    return rates;
}

double level_log_coefficient(ModelKind model, int k, const IntervalGrid& grid, int N,
                             BoundKind bound, CoeffMode mode) {
    if (N < 1) throw config_error("level coefficient requires N >= 1");
    const int m = grid.m;
    const double L1 = grid.log_lambda1, Lp = grid.log_lambda_prime;
    double lkf = 0;
    for (int v = 2; v <= k; ++v) lkf += std::log((double)v);

    long M;
    double lpref;
    if (model == ModelKind::KTree) {
        if (bound == BoundKind::Lower) {
            M = (long)m - (long)N * (k - 1) + 1;
            lpref = std::log((double)k / (2.0 * L1)) +
                    (double)N * (lkf + (k - 1) * std::log(L1) - k * std::log((double)k));
        } else {
            M = (long)m - 1;
            double g1 = 1.0 + (double)(k - 1) / k * Lp;
            lpref = std::log((double)k * g1 / (2.0 * Lp)) +
                    (double)N * (lkf + (k - 1) * std::log(Lp) - k * std::log((double)k));
        }
    } else {
        if (bound == BoundKind::Lower) {
            M = (long)m - (long)k * N + 1;
            lpref = std::log((double)(k - 1) / (2.0 * L1)) +
                    (double)N * (lkf + k * std::log(L1) - k * std::log((double)(k - 1)));
        } else {
            M = (long)m - 1;
            double g1 = 1.0 + (double)(k - 2) / (k - 1) * Lp;
            lpref = std::log((double)(k - 1) * g1 / (2.0 * Lp)) +
                    (double)N * (lkf + k * std::log(Lp) - k * std::log((double)(k - 1)));
        }
    }
    if (M < 0) throw config_error("level N unreachable at horizon m (M < 0)");
    std::vector<double> rates = bound_rates(model, k, grid, bound);
    double lcoef;
    if (mode == CoeffMode::Exact) {
        lcoef = gf_log_coefficients(N, M, rates).back();
    } else {
        lcoef = llt_coefficient(k, N, M, rates).log_estimate;
    }
    return lpref + lcoef;
}

double level_coefficient(ModelKind model, int k, const IntervalGrid& grid, int N,
                         BoundKind bound, CoeffMode mode) {
    return std::exp(level_log_coefficient(model, k, grid, N, bound, mode));
}

} // namespace kth
