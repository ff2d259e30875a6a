// graph_process.hpp — exact simulators for the random k-tree growth process
// and the random k-Apollonian subdivision process.
//
// Cliques are tracked as configurations (i, l): the lowest BFS level i seen by
// the clique's vertices and the number l of vertices at that level.  Vertex
// identities never matter for heights/level sets, so records are packed into
// 4 bytes (level << 8 | l), which keeps t = 2^27 runs within ~0.5 GiB.
#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "kth/errors.hpp"
#include "kth/rng.hpp"

namespace kth {

enum class ModelKind { KTree, Apollonian };

const char* model_name(ModelKind m);

struct CliqueRecord {
    uint32_t level;
    uint32_t low_count; // l: KTree 1..k-1; Apollonian 1..k (l=k means all on one level)
};

struct ProcessState {
    ModelKind model;
    int k;
    uint64_t step;                    // t: KTree starts at 1, Apollonian at 0
    std::vector<uint32_t> cliques;    // packed: level << 8 | low_count
    std::vector<uint64_t> level_histogram; // vertex count per level
    uint32_t height;
    Xoshiro256 rng;
    std::optional<uint64_t> root_reset_step;

    uint64_t clique_count() const { return cliques.size(); }
    uint64_t vertex_count() const {
        return model == ModelKind::KTree ? step + k - 1 : step + k;
    }
    CliqueRecord record(uint64_t idx) const {
        uint32_t p = cliques[idx];
        return {p >> 8, p & 0xffu};
    }
};

ProcessState new_process(ModelKind model, int k, uint64_t seed);

// Children produced when a new vertex is attached inside `parent`.
// KTree: drop_choice in 1..k picks the excluded parent vertex (1..l are the
// level-i vertices); exactly one child.  Apollonian: all k children at once,
// drop_choice ignored.  Second member of the result is the new vertex level.
std::pair<std::vector<CliqueRecord>, uint32_t>
child_configs(ModelKind model, int k, CliqueRecord parent, int drop_choice);

void step(ProcessState& st);
void run_to(ProcessState& st, uint64_t t);

// Rewrite all current cliques as level-0 roots (KTree only, at step == s):
// subsequent censuses count configurations relative to the step-s cliques.
void reset_roots(ProcessState& st, uint64_t s);

std::map<std::pair<uint32_t, uint32_t>, uint64_t> clique_census(const ProcessState& st);

} // namespace kth
