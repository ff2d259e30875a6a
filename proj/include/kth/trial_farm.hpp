// trial_farm.hpp — seeded independent trials of the growth processes.
// The OpenMP farm and the serial reference produce identical results for a
// given master seed: every trial owns a stream derived from (seed, cell, index).
#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "kth/graph_process.hpp"

namespace kth {

struct TrialResult {
    ModelKind model;
    int k;
    uint64_t t;
    uint64_t seed;
    uint32_t height;
    bool has_census = false;
    std::map<std::pair<uint32_t, uint32_t>, uint64_t> level_counts;
    double wall_time_s = 0.0;
};

struct TrialOptions {
    bool with_census = false;
    std::optional<uint64_t> reset_at; // KTree: reset_roots at this step
};

uint64_t cell_seed(uint64_t master_seed, ModelKind model, int k, uint64_t t,
                   int trial);

TrialResult run_one_trial(ModelKind model, int k, uint64_t t, uint64_t seed,
                          const TrialOptions& opt = {});

// Reference implementation (plain loop).
std::vector<TrialResult> run_trials_serial(ModelKind model, int k, uint64_t t,
                                           int trials, uint64_t master_seed,
                                           const TrialOptions& opt = {});

// OpenMP farm; jobs <= 1 falls back to the serial path.
std::vector<TrialResult> run_trials(ModelKind model, int k, uint64_t t,
                                    int trials, uint64_t master_seed, int jobs,
                                    const TrialOptions& opt = {});

// One trajectory, recording the height at each checkpoint (ascending ts).
std::vector<uint32_t> heights_at(ModelKind model, int k,
                                 const std::vector<uint64_t>& ts, uint64_t seed);

} // namespace kth
