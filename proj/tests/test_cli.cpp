#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kth/constants.hpp"

#ifndef KTH_CLI_PATH
#error "KTH_CLI_PATH must point at the ktree-heights binary"
#endif

namespace {

struct RunResult {
    int code;
    std::string out;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    std::string outf = "/tmp/kth_cli_test_out.txt";
    std::string cmd = std::string(KTH_CLI_PATH) + " " + args + " > " + outf + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    return {WEXITSTATUS(rc), slurp(outf)};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_CASE("gen: determinism, schema, prediction column") {
    auto r1 = run_cli("gen --model ktree --k 2,3 --t 2^10,2^11 --trials 4 --seed 9");
    auto r2 = run_cli("gen --model ktree --k 3,2 --t 2^11,2^10 --trials 4 --seed 9");
    CHECK(r1.code == 0);
    CHECK(r1.out == r2.out); // byte-identical sorted output
    auto rows = parse_csv(r1.out);
    REQUIRE(rows.size() == 1 + 2 * 2 * 4);
    CHECK(rows[0] == std::vector<std::string>{"model", "k", "t", "trial", "seed",
                                              "height", "predicted", "c", "c_log_t"});
    for (size_t i = 1; i < rows.size(); ++i) {
        int k = std::stoi(rows[i][1]);
        uint64_t t = std::stoull(rows[i][2]);
        CHECK(std::stol(rows[i][6]) == kth::predict_height(k, t));
        CHECK(std::stol(rows[i][5]) >= 1);
    }
    // different seed changes the data
    auto r3 = run_cli("gen --model ktree --k 2,3 --t 2^10,2^11 --trials 4 --seed 10");
    CHECK(r3.out != r1.out);
}

TEST_CASE("gen: jobs do not change results; env var respected") {
    auto base = run_cli("gen --model ktree --k 3 --t 5000 --trials 6 --seed 3 --jobs 1");
    auto par = run_cli("gen --model ktree --k 3 --t 5000 --trials 6 --seed 3 --jobs 3");
    CHECK(base.code == 0);
    CHECK(base.out == par.out);
    auto env = run_cli("gen --model ktree --k 3 --t 5000 --trials 6 --seed 3");
    setenv("KTREE_HEIGHTS_JOBS", "2", 1);
    auto env2 = run_cli("gen --model ktree --k 3 --t 5000 --trials 6 --seed 3");
    unsetenv("KTREE_HEIGHTS_JOBS");
    CHECK(env.out == env2.out);
}

TEST_CASE("config errors exit with code 2") {
    CHECK(run_cli("gen --model nosuch --k 3 --t 100 --trials 1").code == 2);
    CHECK(run_cli("gen --model apollonian --k 2 --t 100 --trials 1").code == 2);
    CHECK(run_cli("gen --model ktree --k 3 --t 1x0 --trials 1").code == 2);
    CHECK(run_cli("gen --model ktree --k 3 --t 100 --trials 0").code == 2);
    CHECK(run_cli("recurrence --model ktree --k 3 --s 100 --t 100").code == 2);
    CHECK(run_cli("definitely-not-a-subcommand").code == 2);
    CHECK(run_cli("gen --model ktree --k 3 --t 100 --trials 1 --jobs 0").code == 2);
}

TEST_CASE("output file and io errors") {
    std::remove("/tmp/kth_cli_out.csv");
    auto r = run_cli("constants --model ktree --k 3 --out /tmp/kth_cli_out.csv");
    CHECK(r.code == 0);
    CHECK(slurp("/tmp/kth_cli_out.csv").find("ktree,3,") != std::string::npos);
    CHECK(run_cli("constants --model ktree --k 3 --out /nonexistent-dir/x.csv").code == 4);
}

TEST_CASE("constants subcommand values") {
    auto r = run_cli("constants --model apollonian --k 3");
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(std::fabs(std::stod(rows[1][2]) - 2.0683) < 5e-4);
    CHECK(std::fabs(std::stod(rows[1][3]) - 0.8342) < 5e-4);
    CHECK(std::stod(rows[1][4]) < 1e-9);

    auto p = run_cli("constants --pittel");
    auto prow = parse_csv(p.out)[1];
    double c = std::stod(prow[3]);
    CHECK(std::fabs((1.0 / (2.0 * c)) * std::exp(1.0 + 1.0 / (2.0 * c)) - 1.0) < 1e-12);

    auto big = run_cli("constants --model ktree --k 64");
    double c64 = std::stod(parse_csv(big.out)[1][3]);
    CHECK(std::fabs(c64 * 64.0 * std::log(2.0) - 1.0) < 0.15);
}

TEST_CASE("table prediction row at 2^27") {
    auto r = run_cli("table --t 2^27");
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 11);
    std::vector<long> expected = {14, 9, 7, 6, 5, 4, 3, 3, 2, 2};
    std::vector<int> ks = {2, 3, 4, 5, 6, 8, 10, 12, 15, 20};
    for (size_t i = 0; i < 10; ++i) {
        CHECK(std::stoi(rows[i + 1][0]) == ks[i]);
        CHECK(std::stol(rows[i + 1][2]) == expected[i]);
    }
    // t=2: every prediction is 1
    auto r2 = run_cli("table --t 2");
    for (auto& row : parse_csv(r2.out))
        if (row[0] != "k") CHECK(row[2] == "1");
}

TEST_CASE("table --simulate adds a measured column") {
    auto r = run_cli("table --t 2^12 --simulate --trials 3 --seed 4");
    CHECK(r.code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 11);
    CHECK(rows[0].size() == 4);
    CHECK(rows[0][3] == "measured_median");
    for (size_t i = 1; i < rows.size(); ++i) CHECK(std::stol(rows[i][3]) >= 1);
}

TEST_CASE("recurrence dump: schema, conservation, sandwich flags") {
    auto r = run_cli("recurrence --model ktree --k 3 --s 10 --t 1000 --omega 8");
    CHECK(r.code == 0); // zero sandwich violations
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() > 10);
    CHECK(rows[0] == std::vector<std::string>{"kind", "t", "i", "l", "w", "total",
                                              "lower", "upper", "ok"});
    bool saw_exact = false, saw_sandwich = false;
    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i][0] == "exact") {
            saw_exact = true;
            CHECK(std::stod(rows[i][5]) == doctest::Approx(1000.0).epsilon(1e-9));
        } else if (rows[i][0] == "sandwich") {
            saw_sandwich = true;
            CHECK(rows[i][8] == "1");
        }
    }
    CHECK(saw_exact);
    CHECK(saw_sandwich);
}

TEST_CASE("figdata schema and overlay column") {
    auto r = run_cli("figdata --k 2,20 --t 2^10,2^12,2^14 --trials 3 --seed 6");
    CHECK(r.code == 0);
    auto rows = parse_csv(r.out);
    // one row per (k, t, statistic), 3 statistics
    REQUIRE(rows.size() == 1 + 2 * 3 * 3);
    CHECK(rows[0] == std::vector<std::string>{"k", "t", "stat", "value"});
    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i][2] == "predicted") {
            int k = std::stoi(rows[i][0]);
            uint64_t t = std::stoull(rows[i][1]);
            CHECK((long)std::stod(rows[i][3]) == kth::predict_height(k, t));
            if (k == 20) CHECK(std::stod(rows[i][3]) == 1.0);
        }
    }
}

TEST_CASE("figdata k=2 slope approaches the k=2 height constant") {
    auto r = run_cli("figdata --k 2 --t 2^10,2^12,2^14,2^16,2^18,2^20 "
                     "--trials 15 --seed 11");
    REQUIRE(r.code == 0);
    std::vector<double> xs, ys; // log t, median height
    for (auto& row : parse_csv(r.out)) {
        if (row[0] == "k" || row[2] != "median_height") continue;
        xs.push_back(std::log(std::stod(row[1])));
        ys.push_back(std::stod(row[3]));
    }
    REQUIRE(xs.size() == 6);
    // least-squares slope over the grid
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) { mx += xs[i]; my += ys[i]; }
    mx /= xs.size();
    my /= ys.size();
    double num = 0, den = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    double slope = num / den;
    double c = kth::solve_pittel();
    CHECK(slope > 0.8 * c);
    CHECK(slope < 1.2 * c);
}

TEST_CASE("json lines output parses") {
    auto r = run_cli("constants --model ktree --k 3,4 --format json");
    std::stringstream ss(r.out);
    std::string line;
    int n = 0;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        CHECK(j["model"] == "ktree");
        CHECK(j["c"].is_number());
        ++n;
    }
    CHECK(n == 2);
}

TEST_CASE("yule-check passes") {
    auto r = run_cli("yule-check --seed 12");
    CHECK(r.code == 0);
    auto rows = parse_csv(r.out);
    CHECK(rows.size() > 10);
    for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].back() == "1");
}
