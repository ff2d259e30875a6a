// ktree-heights — experiment harness for the random k-tree / k-Apollonian
// growth processes: trial farming, constants queries, table and figure data,
// recurrence dumps with sandwich verification, and Yule distribution checks.
//
// Output is CSV (default) or JSON lines; see README for the frozen schemas.
// Exit codes: 0 ok, 2 bad configuration, 3 invariant violation, 4 I/O error.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kth/constants.hpp"
#include "kth/graph_process.hpp"
#include "kth/level_recurrence.hpp"
#include "kth/trial_farm.hpp"
#include "kth/yule.hpp"

using nlohmann::ordered_json;

namespace {

enum ExitCode { EXIT_OK = 0, EXIT_CONFIG = 2, EXIT_INVARIANT = 3, EXIT_IO = 4 };

uint64_t parse_count(const std::string& s) {
    // accepts plain integers and "B^E" exponent syntax, e.g. "2^27"
    auto caret = s.find('^');
    try {
        if (caret == std::string::npos) {
            size_t pos = 0;
            unsigned long long v = std::stoull(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        }
        size_t p1 = 0, p2 = 0;
        std::string bs = s.substr(0, caret), es = s.substr(caret + 1);
        unsigned long long base = std::stoull(bs, &p1);
        unsigned long long expo = std::stoull(es, &p2);
        if (p1 != bs.size() || p2 != es.size()) throw std::invalid_argument(s);
        uint64_t v = 1;
        for (unsigned long long i = 0; i < expo; ++i) {
            if (v > UINT64_MAX / base) throw std::out_of_range(s);
            v *= base;
        }
        return v;
    } catch (const std::exception&) {
        throw kth::config_error("cannot parse count '" + s + "'");
    }
}

std::vector<uint64_t> parse_count_list(const std::vector<std::string>& in) {
    std::vector<uint64_t> out;
    for (const auto& item : in) {
        std::stringstream ss(item);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) out.push_back(parse_count(tok));
    }
    return out;
}

std::vector<int> parse_int_list(const std::vector<std::string>& in) {
    std::vector<int> out;
    for (uint64_t v : parse_count_list(in)) out.push_back((int)v);
    return out;
}

kth::ModelKind parse_model(const std::string& s) {
    if (s == "ktree") return kth::ModelKind::KTree;
    if (s == "apollonian") return kth::ModelKind::Apollonian;
    throw kth::config_error("unknown model '" + s + "' (ktree|apollonian)");
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// One output row: ordered (field, value) pairs; values keep their JSON type.
struct Row {
    ordered_json j = ordered_json::object();
    Row& f(const std::string& name, const std::string& v) { j[name] = v; return *this; }
    Row& f(const std::string& name, uint64_t v) { j[name] = v; return *this; }
    Row& f(const std::string& name, long v) { j[name] = v; return *this; }
    Row& f(const std::string& name, int v) { j[name] = v; return *this; }
    Row& f(const std::string& name, double v) { j[name] = v; return *this; }
    Row& f(const std::string& name, bool v) { j[name] = v; return *this; }
};

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

struct Writer {
    std::string format; // csv | json
    std::ostream* os = &std::cout;
    std::ofstream file;
    bool header_written = false;

    void open(const std::string& path) {
        if (path.empty() || path == "-") return;
        file.open(path);
        if (!file) throw kth::io_error("cannot open output file '" + path + "'");
        os = &file;
    }
    void emit(const Row& r) {
        if (format == "json") {
            (*os) << r.j.dump() << "\n";
            return;
        }
        if (!header_written) {
            bool first = true;
            for (auto& [key, val] : r.j.items()) {
                (*os) << (first ? "" : ",") << csv_quote(key);
                first = false;
            }
            (*os) << "\n";
            header_written = true;
        }
        bool first = true;
        for (auto& [key, val] : r.j.items()) {
            std::string cell;
            if (val.is_string()) cell = val.get<std::string>();
            else if (val.is_boolean()) cell = val.get<bool>() ? "1" : "0";
            else if (val.is_number_float()) cell = fmt_double(val.get<double>());
            else cell = val.dump();
            (*os) << (first ? "" : ",") << csv_quote(cell);
            first = false;
        }
        (*os) << "\n";
    }
    void finish() {
        os->flush();
        if (os->fail()) throw kth::io_error("write failure on output stream");
    }
};

double height_constant(kth::ModelKind model, int k) {
    if (model == kth::ModelKind::KTree && k == 2) return kth::solve_pittel();
    return kth::solve_constants(model, k).c;
}

uint32_t median_height(std::vector<uint32_t> h) {
    std::sort(h.begin(), h.end());
    return h[h.size() / 2];
}

int default_jobs() {
    if (const char* e = std::getenv("KTREE_HEIGHTS_JOBS")) {
        try {
            return std::max(1, std::stoi(e));
        } catch (const std::exception&) {
            throw kth::config_error("bad KTREE_HEIGHTS_JOBS value");
        }
    }
    return 1;
}

const std::vector<int> TABLE_KS = {2, 3, 4, 5, 6, 8, 10, 12, 15, 20};

// ------------------------------------------------------------- subcommands

int cmd_gen(const std::string& model_s, const std::vector<std::string>& ks,
            const std::vector<std::string>& ts, int trials, uint64_t seed,
            Writer& w, int jobs) {
    kth::ModelKind model = parse_model(model_s);
    std::vector<int> klist = parse_int_list(ks);
    std::vector<uint64_t> tlist = parse_count_list(ts);
    if (klist.empty() || tlist.empty() || trials < 1)
        throw kth::config_error("gen requires --k, --t and --trials >= 1");
    std::sort(klist.begin(), klist.end());
    std::sort(tlist.begin(), tlist.end());
    for (int k : klist) {
        double c = height_constant(model, k);
        for (uint64_t t : tlist) {
            if (t < 2) throw kth::config_error("t must be >= 2");
            auto results = kth::run_trials(model, k, t, trials, seed, jobs);
            long pred = kth::predict_height(k, t);
            for (int i = 0; i < trials; ++i) {
                const auto& r = results[i];
                Row row;
                row.f("model", std::string(kth::model_name(model)))
                    .f("k", k)
                    .f("t", t)
                    .f("trial", i)
                    .f("seed", r.seed)
                    .f("height", (uint64_t)r.height)
                    .f("predicted", pred)
                    .f("c", c)
                    .f("c_log_t", c * std::log((double)t));
                w.emit(row);
            }
        }
    }
    return EXIT_OK;
}

int cmd_constants(const std::string& model_s, const std::vector<std::string>& ks,
                  bool pittel, Writer& w) {
    if (pittel || (model_s == "ktree" && !ks.empty() && ks.size() == 1 && ks[0] == "2")) {
        double c = kth::solve_pittel();
        double x = 1.0 / (2.0 * c);
        Row row;
        row.f("model", std::string("ktree"))
            .f("k", 2)
            .f("a", std::string(""))
            .f("c", c)
            .f("phi_residual", std::fabs(x * std::exp(1.0 + x) - 1.0))
            .f("c_residual", 0.0);
        w.emit(row);
        return EXIT_OK;
    }
    kth::ModelKind model = parse_model(model_s);
    std::vector<int> klist = parse_int_list(ks);
    if (klist.empty()) throw kth::config_error("constants requires --k or --pittel");
    for (int k : klist) {
        auto sol = kth::solve_constants(model, k);
        Row row;
        row.f("model", std::string(kth::model_name(model)))
            .f("k", k)
            .f("a", sol.a)
            .f("c", sol.c)
            .f("phi_residual", sol.phi_residual)
            .f("c_residual", sol.c_residual);
        w.emit(row);
    }
    return EXIT_OK;
}

int cmd_table(const std::string& t_s, bool simulate, int trials, uint64_t seed,
              Writer& w, int jobs) {
    uint64_t t = parse_count(t_s);
    if (t < 2) throw kth::config_error("t must be >= 2");
    for (int k : TABLE_KS) {
        Row row;
        row.f("k", k).f("t", t).f("predicted", kth::predict_height(k, t));
        if (simulate) {
            auto results = kth::run_trials(kth::ModelKind::KTree, k, t, trials, seed, jobs);
            std::vector<uint32_t> hs;
            for (const auto& r : results) hs.push_back(r.height);
            row.f("measured_median", (uint64_t)median_height(hs));
        }
        w.emit(row);
    }
    return EXIT_OK;
}

int cmd_recurrence(const std::string& model_s, int k, uint64_t s,
                   const std::string& t_s, int i_max, double omega, Writer& w) {
    kth::ModelKind model = parse_model(model_s);
    uint64_t t = parse_count(t_s);
    kth::IntervalGrid grid = kth::make_grid(s, t, omega);
    kth::BoundSeries bs = kth::bound_series(model, k, grid, i_max);
    auto snaps = kth::exact_snapshots(model, k, s, grid.points, i_max);
    double norm = (model == kth::ModelKind::KTree)
                      ? (double)s
                      : (double)(k - 1) * (double)s + 1.0;
    const int lw = bs.lw;

    // exact table at the horizon, with the conservation total per row
    const auto& fin = snaps.back();
    double total = 0;
    for (double v : fin.w) total += v;
    for (int i = 0; i < fin.rows; ++i)
        for (int l = 1; l <= lw; ++l) {
            Row row;
            row.f("kind", std::string("exact"))
                .f("t", fin.t)
                .f("i", i)
                .f("l", l)
                .f("w", fin.at(i, l, lw))
                .f("total", total)
                .f("lower", std::string(""))
                .f("upper", std::string(""))
                .f("ok", true);
            w.emit(row);
        }

    uint64_t violations = 0;
    const double rel = 1e-9, abs_slack = 1e-280;
    for (int j = 0; j <= grid.m; ++j) {
        int rows = std::max({snaps[j].rows, bs.rows_lower[j], bs.rows_upper[j]});
        for (int i = 0; i < rows; ++i)
            for (int l = 1; l <= lw; ++l) {
                double mid = snaps[j].at(i, l, lw) / norm;
                double lo = bs.lower_at(j, i, l);
                double hi = bs.upper_at(j, i, l);
                bool ok = !(lo > mid * (1.0 + rel) + abs_slack ||
                            mid > hi * (1.0 + rel) + abs_slack);
                if (!ok) ++violations;
                double tj = 0;
                for (double v : snaps[j].w) tj += v;
                Row row;
                row.f("kind", std::string("sandwich"))
                    .f("t", grid.points[j])
                    .f("i", i)
                    .f("l", l)
                    .f("w", mid)
                    .f("total", tj)
                    .f("lower", lo)
                    .f("upper", hi)
                    .f("ok", ok);
                w.emit(row);
            }
    }
    if (violations > 0) {
        std::cerr << "sandwich violations: " << violations << "\n";
        return EXIT_INVARIANT;
    }
    return EXIT_OK;
}

int cmd_figdata(const std::vector<std::string>& ks, const std::vector<std::string>& ts,
                int trials, uint64_t seed, Writer& w, int jobs) {
    (void)jobs;
    std::vector<int> klist = parse_int_list(ks);
    std::vector<uint64_t> tlist = parse_count_list(ts);
    if (klist.empty() || tlist.empty() || trials < 1)
        throw kth::config_error("figdata requires --k, --t and --trials >= 1");
    std::sort(klist.begin(), klist.end());
    std::sort(tlist.begin(), tlist.end());
    for (int k : klist) {
        // one trajectory per trial, heights sampled at every grid point
        std::vector<std::vector<uint32_t>> curves(trials);
        for (int i = 0; i < trials; ++i) {
            uint64_t sd = kth::cell_seed(seed, kth::ModelKind::KTree, k,
                                         tlist.back(), i);
            curves[i] = kth::heights_at(kth::ModelKind::KTree, k, tlist, sd);
        }
        for (size_t ti = 0; ti < tlist.size(); ++ti) {
            std::vector<uint32_t> hs;
            double mean = 0;
            for (int i = 0; i < trials; ++i) {
                hs.push_back(curves[i][ti]);
                mean += curves[i][ti];
            }
            mean /= trials;
            uint64_t t = tlist[ti];
            auto emit_stat = [&](const std::string& stat, double v) {
                Row row;
                row.f("k", k).f("t", t).f("stat", stat).f("value", v);
                w.emit(row);
            };
            emit_stat("median_height", (double)median_height(hs));
            emit_stat("mean_height", mean);
            emit_stat("predicted", (double)kth::predict_height(k, t));
        }
    }
    return EXIT_OK;
}

int cmd_yule_check(uint64_t seed, Writer& w) {
    bool all_ok = true;
    auto emit = [&](const std::string& check, const std::string& params,
                    double value, double target, double tol) {
        bool ok = std::fabs(value - target) <= tol;
        all_ok = all_ok && ok;
        Row row;
        row.f("check", check).f("params", params).f("value", value)
            .f("target", target).f("tolerance", tol).f("ok", ok);
        w.emit(row);
    };
    for (long theta : {1L, 4L, 10L})
        for (double tau : {0.5, 1.0, 2.0}) {
            kth::YuleParams p{theta, tau};
            char ps[64];
            std::snprintf(ps, sizeof(ps), "theta=%ld tau=%g", theta, tau);
            emit("yule_normalization", ps, kth::yule_normalization(p), 1.0, 1e-9);
            emit("yule_mean", ps, kth::yule_mean(p),
                 (double)theta * std::exp(tau), 1e-6 * (double)theta * std::exp(tau));
        }
    // sampler total-variation distance against the pmf
    {
        kth::YuleParams p{1, 1.0};
        kth::Xoshiro256 rng(seed);
        const int n_samples = 100000;
        std::vector<uint64_t> counts;
        for (int i = 0; i < n_samples; ++i) {
            long n = kth::yule_sample(p, rng);
            if ((size_t)n >= counts.size()) counts.resize(n + 1, 0);
            counts[n]++;
        }
        double tv = 0;
        for (size_t n = 1; n < counts.size(); ++n)
            tv += std::fabs((double)counts[n] / n_samples - kth::yule_pmf(p, (long)n));
        tv *= 0.5;
        emit("yule_sampler_tv", "theta=1 tau=1", tv, 0.0, 0.01);
    }
    for (int k : {3, 4})
        for (long s : {1L, 5L})
            for (double t : {0.5, 2.0}) {
                char ps[64];
                std::snprintf(ps, sizeof(ps), "k=%d s=%ld t=%g", k, s, t);
                emit("multi_birth_normalization", ps,
                     kth::multi_birth_normalization(k, s, t), 1.0, 1e-9);
            }
    return all_ok ? EXIT_OK : EXIT_INVARIANT;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"height experiments for random k-trees and k-Apollonian networks"};
    app.require_subcommand(1);

    std::string model = "ktree", format = "csv", out, t_single = "1024";
    std::vector<std::string> ks, ts;
    int trials = 11, i_max = 100000, jobs = -1; // -1: fall back to env/1
    uint64_t seed = 1, s_root = 10;
    double omega = 10.0;
    bool simulate = false, pittel = false;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--out", out, "output path (default stdout)");
        c->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
        c->add_option("--jobs", jobs, "worker count (default $KTREE_HEIGHTS_JOBS or 1)");
        c->add_option("--seed", seed, "master seed");
    };

    auto* gen = app.add_subcommand("gen", "farm seeded trials, one row each");
    gen->add_option("--model", model);
    gen->add_option("--k", ks, "k values (repeat or comma-separate)");
    gen->add_option("--t", ts, "t values; exponent syntax like 2^27 accepted");
    gen->add_option("--trials", trials);
    add_common(gen);

    auto* cst = app.add_subcommand("constants", "height constants a(k), c(k)");
    cst->add_option("--model", model);
    cst->add_option("--k", ks);
    cst->add_flag("--pittel", pittel, "solve the k=2 equation");
    add_common(cst);

    auto* tab = app.add_subcommand("table", "prediction (and measured) height table");
    tab->add_option("--t", t_single);
    tab->add_flag("--simulate", simulate, "add the measured median column");
    tab->add_option("--trials", trials);
    add_common(tab);

    auto* rec = app.add_subcommand("recurrence", "expectation table + sandwich report");
    rec->add_option("--model", model);
    int rec_k = 3;
    rec->add_option("--k", rec_k);
    rec->add_option("--s", s_root, "root step");
    rec->add_option("--t", t_single);
    rec->add_option("--i-max", i_max, "level cap");
    rec->add_option("--omega", omega, "grid interpolation parameter hint");
    add_common(rec);

    auto* fig = app.add_subcommand("figdata", "height-vs-log t curves per k");
    fig->add_option("--k", ks);
    fig->add_option("--t", ts, "t grid");
    fig->add_option("--trials", trials);
    add_common(fig);

    auto* yc = app.add_subcommand("yule-check", "validate the pure-birth distributions");
    add_common(yc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? EXIT_OK : EXIT_CONFIG;
    }

    Writer w;
    try {
        if (jobs == -1) jobs = default_jobs();
        if (jobs < 1) throw kth::config_error("--jobs must be >= 1");
        w.format = format;
        w.open(out);
        int rc = EXIT_OK;
        if (gen->parsed()) rc = cmd_gen(model, ks, ts, trials, seed, w, jobs);
        else if (cst->parsed()) rc = cmd_constants(model, ks, pittel, w);
        else if (tab->parsed()) rc = cmd_table(t_single, simulate, trials, seed, w, jobs);
        else if (rec->parsed()) rc = cmd_recurrence(model, rec_k, s_root, t_single, i_max, omega, w);
        else if (fig->parsed()) rc = cmd_figdata(ks, ts, trials, seed, w, jobs);
        else if (yc->parsed()) rc = cmd_yule_check(seed, w);
        w.finish();
        return rc;
    } catch (const kth::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return EXIT_CONFIG;
    } catch (const kth::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return EXIT_IO;
    } catch (const kth::invariant_error& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return EXIT_INVARIANT;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_INVARIANT;
    }
}
