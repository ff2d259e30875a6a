#include "kth/trial_farm.hpp"

#include <chrono>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kth {

uint64_t cell_seed(uint64_t master_seed, ModelKind model, int k, uint64_t t,
                   int trial) {
    uint64_t tag = ((uint64_t)(model == ModelKind::Apollonian) << 63) ^
                   ((uint64_t)k << 40) ^ t;
    return trial_seed(master_seed, tag, (uint64_t)trial);
}

TrialResult run_one_trial(ModelKind model, int k, uint64_t t, uint64_t seed,
                          const TrialOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    ProcessState st = new_process(model, k, seed);
    if (opt.reset_at) {
        run_to(st, *opt.reset_at);
        reset_roots(st, *opt.reset_at);
    }
    run_to(st, t);
    TrialResult r;
    r.model = model;
    r.k = k;
    r.t = t;
    r.seed = seed;
    r.height = st.height;
    if (opt.with_census) {
        r.has_census = true;
        r.level_counts = clique_census(st);
    }
    r.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<TrialResult> run_trials_serial(ModelKind model, int k, uint64_t t,
                                           int trials, uint64_t master_seed,
                                           const TrialOptions& opt) {
    std::vector<TrialResult> out(trials);
    for (int i = 0; i < trials; ++i)
        out[i] = run_one_trial(model, k, t, cell_seed(master_seed, model, k, t, i), opt);
    return out;
}

std::vector<TrialResult> run_trials(ModelKind model, int k, uint64_t t,
                                    int trials, uint64_t master_seed, int jobs,
                                    const TrialOptions& opt) {
    if (jobs <= 1) return run_trials_serial(model, k, t, trials, master_seed, opt);
    std::vector<TrialResult> out(trials);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
#endif
    for (int i = 0; i < trials; ++i)
        out[i] = run_one_trial(model, k, t, cell_seed(master_seed, model, k, t, i), opt);
    return out;
}

std::vector<uint32_t> heights_at(ModelKind model, int k,
                                 const std::vector<uint64_t>& ts, uint64_t seed) {
    std::vector<uint32_t> out;
    out.reserve(ts.size());
    ProcessState st = new_process(model, k, seed);
    for (uint64_t t : ts) {
        run_to(st, t);
        out.push_back(st.height);
    }
    return out;
}

} // namespace kth
