// Acceptance gate: one line per criterion, [PASS]/[FAIL], exit nonzero if any
// gating criterion fails. Criterion 12 is exploratory and never gates.
//
// argv[1] = path to the remlab CLI binary (used by the reproducibility
// criterion). Monte Carlo criteria run fixed seeds from pilot_constants.hpp;
// several share one large dataset at (beta=0.3, N=16, t=2) — prefixes of a
// fixed-seed replica sequence are themselves fixed-seed runs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "remlab/experiments.hpp"
#include "remlab/moments.hpp"
#include "remlab/pilot_constants.hpp"
#include "remlab/simulator.hpp"
#include "remlab/theory.hpp"

using namespace remlab;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const std::string& id, bool ok, const std::string& detail, bool gating = true) {
    if (!ok && gating) ++g_failures;
    std::printf("[%s] %-3s %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// --- 1: untruncated variance identity (quadrature path) ---------------------

void criterion1() {
    const double inf = std::numeric_limits<double>::infinity();
    bool ok = true;
    double worst = 0;
    for (double b : {0.1, 0.3, kBetaCrit}) {
        for (int n : {4, 16, 64}) {
            ModelParams p(b, n);
            // untruncated second moment: integrate over the whole line (any
            // finite cap still removes Phibar(c - 2 b sqrt(N)) of mass, which
            // at N = 64 would already exceed the tolerance)
            double bsn = b * p.sqrt_n();
            auto f = [&](double x) {
                double y = y_of_x(p, x);
                return y * y * std::exp(log_gauss_pdf(x));
            };
            double m2 = integrate(f, -inf, inf, 1e-12,
                                  {0.5 * bsn, 2.0 * bsn}).value;
            double target = -std::expm1(-n * b * b);
            double rel = std::abs(m2 - target) / target;
            worst = std::max(worst, rel);
            if (rel > 1e-10) ok = false;
        }
    }
    report("1", ok, "variance identity m2 = 1-e^{-N b^2}: worst rel " + fmt(worst) +
                        " (tol 1e-10)");
}

// --- 2: dual-path moments ---------------------------------------------------

void criterion2() {
    bool ok = true;
    double worst = 0;
    for (double b : {0.1, 0.3, kBetaCrit}) {
        for (int n : {8, 16, 32}) {
            for (int ti = 0; ti < 2; ++ti) {
                double t = ti == 0 ? 2.0 : std::pow(n, 0.25);
                auto spec = truncation_spec(ModelParams(b, n), t);
                auto cf = truncated_moments(spec, MomentMethod::ClosedForm);
                auto qd = truncated_moments(spec, MomentMethod::Quadrature);
                for (auto [x, y] : {std::pair{cf.m1, qd.m1}, {cf.m2, qd.m2},
                                    {cf.m3abs, qd.m3abs}}) {
                    double rel = std::abs(x - y) / std::max(std::abs(x), 1e-3);
                    worst = std::max(worst, rel);
                    if (std::abs(x - y) > std::max(1e-9 * std::abs(x), 1e-12)) ok = false;
                }
            }
        }
    }
    report("2", ok, "closed form vs quadrature moments: worst rel " + fmt(worst) +
                        " (tol 1e-9)");
}

// --- 3: SCGF convergence ----------------------------------------------------

void criterion3() {
    const double lambdas[] = {-2.0, -1.0, 1.0, 2.0};
    bool ok = true;
    double prev = 1e300, gap80 = 0;
    for (int n : {20, 40, 80}) {
        auto s = truncation_spec(ModelParams(0.3, n), std::pow(n, 0.3));
        double worst = 0;
        for (double l : lambdas)
            worst = std::max(worst, std::abs(scgf_increment(s, l) - 0.5 * l * l));
        if (!(worst < prev)) ok = false;
        prev = worst;
        if (n == 80) gap80 = worst;
    }
    if (!(gap80 <= pilot::kScgfGapMaxAtN80)) ok = false;

    double prevc = 1e300;
    for (int n : {20, 40, 80}) {
        auto s = truncation_spec(ModelParams(kBetaCrit, n),
                                 std::pow(std::log(static_cast<double>(n)), 0.4));
        double worst = 0;
        for (double l : lambdas)
            worst = std::max(worst, std::abs(scgf_increment(s, l) - 0.25 * l * l));
        if (!(worst < prevc)) ok = false;
        prevc = worst;
    }
    report("3", ok, "scgf -> lambda^2/2 decreasing, gap(N=80) " + fmt(gap80) + " <= " +
                        fmt(pilot::kScgfGapMaxAtN80) + "; critical trend toward lambda^2/4 " +
                        "ends at gap " + fmt(prevc));
}

// --- 4: truncation event rate ----------------------------------------------

void criterion4() {
    auto s100 = truncation_spec(ModelParams(0.3, 100), std::pow(100.0, 0.25));
    auto [e100, p100] = truncation_event_rate(s100);
    double gap = std::abs(e100 - p100);
    report("4a", gap < 0.2,
           "exact vs predicted at N=100: |" + fmt(e100) + " - (" + fmt(p100) + ")| = " +
               fmt(gap) + " (required < 0.2; the neglected o(1) term is ~0.42 at this N "
               "-- see the analysis note in this file)");

    bool mono = true;
    double prev = 0.0, last = 0.0;
    for (int n : {50, 100, 200, 400}) {
        auto s = truncation_spec(ModelParams(0.3, n), std::pow(n, 0.25));
        double e = truncation_event_rate(s).first;
        if (!(e < prev)) mono = false;
        prev = e;
        last = e;
    }
    report("4b", mono, "exact rate strictly decreasing along N in {50,100,200,400}, "
                       "ending at " + fmt(last));
    report("4c", last < -10.0,
           "exact rate at N=400 is " + fmt(last) +
               " (required < -10; at t = N^{1/4} the rate is ~ -0.366 sqrt(N), "
               "crossing -10 only near N ~ 750)");
    // Analysis: with t = N^{1/4},
    //   exact - predicted = [(1 + log2/(2 b^2)) log t - log(b + log2/(2b))
    //                        - log(2 pi)/2 + log(Mills corr)] / t^2,
    // which is o(1) but equals 0.424 at N=100 and 0.297 at N=400 (40-digit
    // check). Both bounds above are therefore unattainable as stated; they are
    // reported honestly rather than loosened. The unit suite pins the true
    // values of the same quantities.
}

// --- 5-9: shared Monte Carlo dataset ----------------------------------------

struct SharedRuns {
    ReplicaDataset big;       // (0.3, 16, t=2, R=4e5)
    ReplicaDataset critical;  // (beta_crit, 20, t=2, R=2000)
};

void criterion5(const SharedRuns& runs) {
    const long long R = pilot::kCltReplicas;
    std::vector<double> w(R);
    for (long long i = 0; i < R; ++i) w[i] = runs.big.records[i].w_log;
    double mean = 0;
    for (double v : w) mean += v;
    mean /= static_cast<double>(R);
    double var = 0, m4 = 0;
    for (double v : w) var += (v - mean) * (v - mean);
    var /= static_cast<double>(R);
    for (double v : w) m4 += std::pow(v - mean, 4);
    m4 /= static_cast<double>(R);
    double se = std::sqrt(std::max(m4 - var * var, 0.0) / static_cast<double>(R));
    double s2 = -std::expm1(-16 * 0.09);
    double ks = ks_distance(w, s2);
    bool ok = std::abs(var - s2) <= 5.0 * se && ks <= pilot::kCltKsMax;
    report("5", ok, "CLT: var " + fmt(var) + " vs s_N^2 " + fmt(s2) + " (" +
                        fmt(std::abs(var - s2) / se) + " se); KS " + fmt(ks) + " <= " +
                        fmt(pilot::kCltKsMax));
    // critical cell: diagnostics only, slow convergence expected
    std::vector<double> wc;
    wc.reserve(runs.critical.records.size());
    for (const auto& r : runs.critical.records) wc.push_back(r.w_log);
    std::printf("[INFO] 5   critical cell (beta_crit, N=20, R=%zu): var %s, "
                "KS vs N(0,1/2) %s, KS vs N(0,1) %s (no gate)\n",
                wc.size(), fmt(runs.critical.summary.w_log.variance).c_str(),
                fmt(ks_distance(wc, 0.5)).c_str(), fmt(ks_distance(wc, 1.0)).c_str());
}

void criterion6(const SharedRuns& runs) {
    long long hits = 0;
    for (const auto& r : runs.big.records)
        if (r.w_log > 2.0) ++hits;
    long long total = static_cast<long long>(runs.big.records.size());
    auto [lo, hi] = wilson_interval(hits, total);
    double s_n = std::sqrt(-std::expm1(-16 * 0.09));
    double q = std::exp(log_gauss_tail(2.0 / s_n));
    bool ok = lo <= 2.0 * q && hi >= 0.5 * q;
    report("6", ok, "tail P(w_log > 2): wilson [" + fmt(lo) + ", " + fmt(hi) +
                        "] vs band [" + fmt(0.5 * q) + ", " + fmt(2.0 * q) + "] (" +
                        std::to_string(hits) + "/" + std::to_string(total) + " hits)");
}

void criterion7(const SharedRuns& runs) {
    long long viol = 0, checked = 0;
    for (const ReplicaDataset* ds : {&runs.big, &runs.critical}) {
        double fsl = fluct_scale_log(ModelParams(ds == &runs.big ? 0.3 : kBetaCrit,
                                                 ds == &runs.big ? 16 : 20));
        for (const auto& r : ds->records) {
            if (r.t_dev < -0.5) continue;
            ++checked;
            double bound = r.w_linear * r.w_linear * std::exp(-fsl);
            if (std::abs(r.w_log - r.w_linear) > bound * (1.0 + 1e-12) + 1e-300) ++viol;
        }
    }
    report("7", viol == 0, "lemma-1 inequality: " + std::to_string(viol) +
                               " violations among " + std::to_string(checked) + " replicas");
}

void criterion8(const SharedRuns& runs) {
    const long long R = pilot::kCltReplicas;
    long long th = 0;
    for (long long i = 0; i < R; ++i) th += runs.big.records[i].trunc_hit ? 1 : 0;
    auto spec = truncation_spec(ModelParams(0.3, 16), 2.0);
    double lt = log_gauss_tail(spec.c);
    double exact = -std::expm1(std::exp(16 * kLog2) * std::log1p(-std::exp(lt)));
    auto [lo, hi] = wilson_interval(th, R);
    bool ok = lo <= exact && exact <= hi;
    report("8", ok, "trunc_hit freq " + fmt(static_cast<double>(th) / static_cast<double>(R)) +
                        " wilson [" + fmt(lo) + ", " + fmt(hi) + "] covers exact " + fmt(exact));
}

void criterion9(const SharedRuns& runs) {
    const long long R = pilot::kCltReplicas;
    long long h16 = 0;
    for (long long i = 0; i < R; ++i)
        if (runs.big.records[i].w_log > 2.0) ++h16;  // 0.5 * sqrt(16)
    auto ds9 = run_replicas(ModelParams(0.3, 9), 3.0, R, RngSpec{pilot::kSeedOverscaleN9}, 1);
    long long h9 = 0;
    for (const auto& r : ds9.records)
        if (r.w_log > 1.5) ++h9;  // 0.5 * sqrt(9)
    bool defined = h9 > 0 && h16 > 0;
    double v9 = defined ? std::log(static_cast<double>(h9) / static_cast<double>(R)) /
                              std::pow(9.0, 0.8) : 0;
    double v16 = defined ? std::log(static_cast<double>(h16) / static_cast<double>(R)) /
                               std::pow(16.0, 0.8) : 0;
    bool ok = defined && v16 < v9;
    report("9", ok, "overscaling: normalized log p at N=16 " + fmt(v16) +
                        " required < N=9 value " + fmt(v9) + " (hits " +
                        std::to_string(h16) + ", " + std::to_string(h9) + ")");
    // Analysis: the measured values match the deterministic Gaussian
    // comparator log Phibar(0.5 sqrt(N)/s_N) / N^0.8 to three digits
    // (-0.657 at N=9, -0.491 at N=16), so this is a property of the defined
    // quantity, not sampling noise: |log p| grows like N/(8 s_N^2) plus an
    // O(log N) prefactor, which between N=9 and N=16 is outpaced by the
    // N^0.8 normalizer (s_N^2 itself still grows 0.555 -> 0.763 there).
    // The normalized value drifts to -infinity eventually, but it first drops
    // below the N=9 value only past N ~ 6000 -- far beyond 2^N simulability.
    // Reported honestly rather than re-parameterized.
}

// --- 10: CLI reproducibility ------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// manifest comparison ignores wall time: only the per-file checksum block counts
std::string checksum_block(const std::string& manifest) {
    auto pos = manifest.find("\"files\"");
    return pos == std::string::npos ? manifest : manifest.substr(pos);
}

void criterion10(const std::string& cli) {
    struct Case { const char* sub; const char* args; };
    const Case cases[] = {
        {"theory", "--beta 0.3,2.0"},
        {"moments", "--beta 0.3 --n-grid 8,16 --schedule power:0:2"},
        {"scgf", "--beta 0.3 --n-grid 16 --lambda-grid -1,1"},
        {"simulate", "--beta 0.3 --n-grid 12 --replicas 100 --seed 42"},
        {"lln", "--beta 0,0.3 --n-grid 8,10 --replicas 200 --seed 7"},
        {"clt", "--beta 0.3 --n-grid 12 --replicas 2000 --seed 11"},
        {"tails", "--beta 0.3 --n-grid 10,12 --schedule power:0:2 --x-grid 0,1 "
                  "--replicas 2000 --seed 13"},
        {"equiv", "--beta 0.3 --n-grid 12 --schedule power:0:2 --replicas 2000 --seed 17"},
        {"overscale", "--beta 0.3 --n-grid 9,10 --replicas 2000 --seed 19"},
        {"ldp-check", "--beta 1 --n-grid 12 --delta 0.3 --replicas 5000 --seed 23"},
    };
    fs::path base = fs::temp_directory_path() / "remlab_acceptance_c10";
    std::error_code ec;
    fs::remove_all(base, ec);
    bool ok = true;
    std::string firstbad;
    for (const auto& c : cases) {
        bool sub_ok = true;
        std::map<int, std::map<std::string, std::string>> outs;
        for (int w : {1, 8}) {
            fs::path dir = base / (std::string(c.sub) + "_w" + std::to_string(w));
            std::string cmd = cli + " " + c.sub + " " + c.args + " --workers " +
                              std::to_string(w) + " --out " + dir.string() + " > /dev/null 2>&1";
            if (std::system(cmd.c_str()) != 0) { sub_ok = false; break; }
            for (const auto& e : fs::directory_iterator(dir))
                outs[w][e.path().filename().string()] = slurp(e.path());
        }
        if (sub_ok) {
            auto &a = outs[1], &b = outs[8];
            if (a.size() != b.size() || a.empty()) sub_ok = false;
            for (const auto& [name, content] : a) {
                if (!b.count(name)) { sub_ok = false; break; }
                if (name == "manifest.json") {
                    if (checksum_block(content) != checksum_block(b[name])) sub_ok = false;
                } else if (content != b[name]) {
                    sub_ok = false;
                }
            }
        }
        if (!sub_ok && firstbad.empty()) firstbad = c.sub;
        ok = ok && sub_ok;
    }
    fs::remove_all(base, ec);
    report("10", ok, ok ? "all 10 subcommands byte-identical for workers 1 vs 8"
                        : "subcommand not reproducible: " + firstbad);
}

// --- 11: LLN ----------------------------------------------------------------

void criterion11() {
    auto ds0 = run_replicas(ModelParams(0.0, 10), 2.0, 50, RngSpec{pilot::kSeedLlnBeta0}, 1);
    bool exact = true;
    for (const auto& r : ds0.records)
        if (r.f_n != kLog2) exact = false;

    bool mono = true;
    double prev = 1e300, lastgap = 0;
    const int ns[] = {8, 16, 24};
    for (int i = 0; i < 3; ++i) {
        auto ds = run_replicas(ModelParams(0.3, ns[i]), 2.0, 1000,
                               RngSpec{pilot::kSeedLlnCells[i]}, 1);
        double gap = std::abs(ds.summary.f_n.mean - limiting_free_energy(0.3));
        if (!(gap < prev)) mono = false;
        prev = gap;
        lastgap = gap;
    }
    report("11", exact && mono,
           std::string("LLN: beta=0 exact f_n = log 2: ") + (exact ? "yes" : "NO") +
               "; gap strictly decreasing over N in {8,16,24}, final gap " + fmt(lastgap));
}

// --- 12: exploratory LDP spot check (never gates) ---------------------------

void criterion12() {
    auto rep = ldp_spot_check(1.0, 12, 0.3, pilot::kLdpReplicas, pilot::kSeedLdp, 1);
    // row 0 = upper side
    double ratio = std::get<double>(rep.rows[0][10]);
    long long hits = std::get<long long>(rep.rows[0][5]);
    bool in_band = hits >= 100 && ratio >= 1.0 / 3.0 && ratio <= 3.0;
    report("12", in_band,
           "EXPLORATORY ldp ratio " + fmt(ratio) + " in [1/3, 3] with " +
               std::to_string(hits) + " hits (never gates)",
           /*gating=*/false);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-remlab-cli>\n");
        return 2;
    }
    std::printf("acceptance suite: deterministic criteria\n");
    criterion1();
    criterion2();
    criterion3();
    criterion4();

    std::printf("acceptance suite: Monte Carlo criteria (fixed seeds, single pass)\n");
    std::fflush(stdout);
    SharedRuns runs;
    runs.big = run_replicas(ModelParams(0.3, 16), 2.0, pilot::kTailReplicas,
                            RngSpec{pilot::kSeedMain}, 1);
    runs.critical = run_replicas(ModelParams(kBetaCrit, 20), 2.0, pilot::kCriticalReplicas,
                                 RngSpec{pilot::kSeedCritical}, 1);
    criterion5(runs);
    criterion6(runs);
    criterion7(runs);
    criterion8(runs);
    criterion9(runs);
    criterion10(argv[1]);
    criterion11();
    criterion12();

    if (g_failures == 0) {
        std::printf("acceptance: all gating criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d gating sub-criteria failed\n", g_failures);
    return 1;
}
