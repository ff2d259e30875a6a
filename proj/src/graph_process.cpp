#include "kth/graph_process.hpp"

#include <new>
#include <string>

namespace kth {

const char* model_name(ModelKind m) {
    return m == ModelKind::KTree ? "ktree" : "apollonian";
}

static inline uint32_t pack(uint32_t level, uint32_t low) {
    return (level << 8) | low;
}

ProcessState new_process(ModelKind model, int k, uint64_t seed) {
    if (model == ModelKind::KTree && k < 2)
        throw config_error("ktree requires k >= 2");
    if (model == ModelKind::Apollonian && k < 3)
        throw config_error("apollonian requires k >= 3");
    if (k > 255)
        throw config_error("k exceeds the packed-record limit (255)");
    ProcessState st;
    st.model = model;
    st.k = k;
    st.step = (model == ModelKind::KTree) ? 1 : 0;
    st.cliques.push_back(pack(0, 1)); // root vertex at level 0, k-1 at level 1
    st.level_histogram = {1, (uint64_t)k - 1};
    st.height = 1;
    st.rng = Xoshiro256(seed);
    return st;
}

std::pair<std::vector<CliqueRecord>, uint32_t>
child_configs(ModelKind model, int k, CliqueRecord parent, int drop_choice) {
    uint32_t i = parent.level, l = parent.low_count;
    uint32_t lmax = (model == ModelKind::KTree) ? (uint32_t)k - 1 : (uint32_t)k;
    if (l < 1 || l > lmax)
        throw config_error("clique record low_count out of range");
    std::vector<CliqueRecord> out;
    if (model == ModelKind::KTree) {
        if (drop_choice < 1 || drop_choice > k)
            throw config_error("drop_choice out of range");
        if ((uint32_t)drop_choice > l) {
            out.push_back({i, l});            // dropped a level-(i+1) vertex
            return {out, i + 1};
        }
        if (l > 1) {
            out.push_back({i, l - 1});        // dropped one of several level-i vertices
            return {out, i + 1};
        }
        out.push_back({i + 1, (uint32_t)k - 1}); // dropped the unique level-i vertex
        return {out, i + 2};
    }
    // Apollonian: the sampled clique is replaced by all k children at once.
    out.reserve(k);
    if (l == 1) {
        out.push_back({i + 1, (uint32_t)k});  // face avoiding the level-i vertex
        for (int c = 1; c < k; ++c) out.push_back({i, 1});
        return {out, i + 1};
    }
    for (uint32_t c = 0; c < l; ++c) out.push_back({i, l - 1});
    for (uint32_t c = l; c < (uint32_t)k; ++c) out.push_back({i, l});
    return {out, i + 1};
}

// Hot path: transitions inlined, records stay packed.
void step(ProcessState& st) {
    const uint32_t k = (uint32_t)st.k;
    uint64_t idx = st.rng.bounded(st.cliques.size());
    uint32_t rec = st.cliques[idx];
    uint32_t i = rec >> 8, l = rec & 0xffu;
    uint32_t nv; // new vertex level
    if (st.model == ModelKind::KTree) {
        uint64_t drop = st.rng.bounded(k) + 1;
        uint32_t child;
        if (drop > l) {
            child = rec;
            nv = i + 1;
        } else if (l > 1) {
            child = rec - 1;
            nv = i + 1;
        } else {
            child = pack(i + 1, k - 1);
            nv = i + 2;
        }
        st.cliques.push_back(child);
    } else {
        if (l == 1) {
            st.cliques[idx] = pack(i + 1, k);
            for (uint32_t c = 1; c < k; ++c) st.cliques.push_back(pack(i, 1));
        } else {
            st.cliques[idx] = pack(i, l - 1);
            for (uint32_t c = 1; c < l; ++c) st.cliques.push_back(pack(i, l - 1));
            for (uint32_t c = l; c < k; ++c) st.cliques.push_back(pack(i, l));
        }
        nv = i + 1;
    }
    if (nv >= st.level_histogram.size()) st.level_histogram.resize(nv + 1, 0);
    st.level_histogram[nv]++;
    if (nv > st.height) st.height = nv;
    st.step++;
}

void run_to(ProcessState& st, uint64_t t) {
    if (t < st.step)
        throw config_error("run_to target below current step");
    try {
        uint64_t final_cliques = (st.model == ModelKind::KTree)
                                     ? t
                                     : (uint64_t)(st.k - 1) * t + 1;
        st.cliques.reserve(final_cliques);
        // Clique counts grow deterministically (+1 per step for k-trees,
        // +(k-1) for Apollonian), so random draws for a whole batch can be
        // made up front — in the same order step() would make them — and the
        // sampled records prefetched before use.  The working set at large t
        // far exceeds cache, so hiding those random-access misses dominates
        // the run time.  Trajectories are bit-identical to repeated step().
        constexpr uint64_t B = 64;
        const uint32_t k = (uint32_t)st.k;
        const uint64_t per_step = (st.model == ModelKind::KTree) ? 1 : k - 1;
        uint64_t idx[B], drop[B];
        while (st.step + B <= t) {
            uint64_t n = st.cliques.size();
            if (st.model == ModelKind::KTree) {
                for (uint64_t j = 0; j < B; ++j) {
                    idx[j] = st.rng.bounded(n + j * per_step);
                    drop[j] = st.rng.bounded(k) + 1;
                    __builtin_prefetch(&st.cliques[idx[j]], 0);
                }
                for (uint64_t j = 0; j < B; ++j) {
                    uint32_t rec = st.cliques[idx[j]];
                    uint32_t i = rec >> 8, l = rec & 0xffu;
                    uint32_t child, nv;
                    if (drop[j] > l) {
                        child = rec;
                        nv = i + 1;
                    } else if (l > 1) {
                        child = rec - 1;
                        nv = i + 1;
                    } else {
                        child = pack(i + 1, k - 1);
                        nv = i + 2;
                    }
                    st.cliques.push_back(child);
                    if (nv >= st.level_histogram.size())
                        st.level_histogram.resize(nv + 1, 0);
                    st.level_histogram[nv]++;
                    if (nv > st.height) st.height = nv;
                }
            } else {
                for (uint64_t j = 0; j < B; ++j) {
                    idx[j] = st.rng.bounded(n + j * per_step);
                    __builtin_prefetch(&st.cliques[idx[j]], 1);
                }
                for (uint64_t j = 0; j < B; ++j) {
                    uint32_t rec = st.cliques[idx[j]];
                    uint32_t i = rec >> 8, l = rec & 0xffu;
                    if (l == 1) {
                        st.cliques[idx[j]] = pack(i + 1, k);
                        for (uint32_t c = 1; c < k; ++c)
                            st.cliques.push_back(pack(i, 1));
                    } else {
                        st.cliques[idx[j]] = pack(i, l - 1);
                        for (uint32_t c = 1; c < l; ++c)
                            st.cliques.push_back(pack(i, l - 1));
                        for (uint32_t c = l; c < k; ++c)
                            st.cliques.push_back(pack(i, l));
                    }
                    uint32_t nv = i + 1;
                    if (nv >= st.level_histogram.size())
                        st.level_histogram.resize(nv + 1, 0);
                    st.level_histogram[nv]++;
                    if (nv > st.height) st.height = nv;
                }
            }
            st.step += B;
        }
        while (st.step < t) step(st);
    } catch (const std::bad_alloc&) {
        throw io_error("allocation failure while growing to t=" + std::to_string(t));
    }
}

void reset_roots(ProcessState& st, uint64_t s) {
    if (st.model != ModelKind::KTree)
        throw config_error("reset_roots is defined for the k-tree model only");
    if (st.step != s)
        throw config_error("reset_roots requires state.step == s");
    for (auto& rec : st.cliques) rec = pack(0, 1);
    // Relative levels: each step-s clique becomes a root. Convention: the s
    // designated root vertices sit at level 0, everything else at level 1.
    uint64_t v = st.vertex_count();
    st.level_histogram.assign(2, 0);
    st.level_histogram[0] = s < v ? s : v;
    st.level_histogram[1] = v - st.level_histogram[0];
    st.height = 1;
    st.root_reset_step = s;
}

std::map<std::pair<uint32_t, uint32_t>, uint64_t> clique_census(const ProcessState& st) {
    std::map<std::pair<uint32_t, uint32_t>, uint64_t> out;
    for (uint32_t rec : st.cliques) out[{rec >> 8, rec & 0xffu}]++;
    return out;
}

} // namespace kth
