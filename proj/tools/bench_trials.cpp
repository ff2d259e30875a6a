// bench-trials — compares the serial reference trial loop against the
// OpenMP farm and verifies they produce identical results.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "kth/trial_farm.hpp"

using namespace kth;

static double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

int main(int argc, char** argv) {
    int k = 3, trials = 16, jobs = 4;
    uint64_t t = 1 << 20, seed = 1;
    for (int i = 1; i + 1 < argc; i += 2) {
        std::string a = argv[i];
        if (a == "--k") k = std::atoi(argv[i + 1]);
        else if (a == "--t") t = std::strtoull(argv[i + 1], nullptr, 10);
        else if (a == "--trials") trials = std::atoi(argv[i + 1]);
        else if (a == "--jobs") jobs = std::atoi(argv[i + 1]);
        else if (a == "--seed") seed = std::strtoull(argv[i + 1], nullptr, 10);
        else { std::fprintf(stderr, "unknown flag %s\n", a.c_str()); return 2; }
    }
    std::printf("k=%d t=%llu trials=%d jobs=%d\n", k, (unsigned long long)t, trials, jobs);

    double t0 = now_s();
    auto serial = run_trials_serial(ModelKind::KTree, k, t, trials, seed);
    double t1 = now_s();
    auto parallel = run_trials(ModelKind::KTree, k, t, trials, seed, jobs);
    double t2 = now_s();

    for (int i = 0; i < trials; ++i)
        if (serial[i].height != parallel[i].height || serial[i].seed != parallel[i].seed) {
            std::fprintf(stderr, "mismatch at trial %d\n", i);
            return 3;
        }
    std::printf("serial   %.3f s\n", t1 - t0);
    std::printf("parallel %.3f s  (x%.2f)\n", t2 - t1, (t1 - t0) / (t2 - t1));
    std::printf("results identical across both paths\n");
    return 0;
}
