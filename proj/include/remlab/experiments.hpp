#pragma once

// Paper-facing studies orchestrated on top of the simulator: LLN convergence,
// CLT goodness of fit, moderate-deviation tails, exponential-equivalence
// diagnostics, overscaling decay and an exploratory LDP spot check. Every
// study is a deterministic function of (config, seed) and reports its
// deterministic comparators next to the Monte Carlo numbers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "remlab/moments.hpp"
#include "remlab/simulator.hpp"
#include "remlab/stats.hpp"
#include "remlab/theory.hpp"

namespace remlab {

using CellValue = std::variant<double, long long, bool, std::string>;

struct StudyReport {
    std::string kind;
    uint64_t seed = 0;
    std::vector<std::string> columns;
    std::vector<std::vector<CellValue>> rows;

    void add_row(std::vector<CellValue> row) { rows.push_back(std::move(row)); }
};

namespace detail {

inline std::vector<double> extract(const std::vector<ReplicaRecord>& recs,
                                   double ReplicaRecord::*field) {
    std::vector<double> v(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) v[i] = recs[i].*field;
    return v;
}

// Per-cell seeds: one fixed odd-multiplier hash step away from the master
// seed, so cells never share variate streams.
inline uint64_t cell_seed(uint64_t master, uint64_t cell_index) {
    uint64_t x = master + 0x9E3779B97F4A7C15ull * (cell_index + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    return x;
}

inline double untruncated_s2(const ModelParams& p) {
    return -std::expm1(-static_cast<double>(p.n) * p.beta * p.beta);
}

}  // namespace detail

// --- LLN (free-energy convergence) ------------------------------------------

inline StudyReport lln_study(const std::vector<double>& betas, const std::vector<int>& n_grid,
                             long long replicas, uint64_t seed, int workers = 1) {
    StudyReport rep;
    rep.kind = "lln";
    rep.seed = seed;
    rep.columns = {"beta", "n", "replicas", "cell_seed", "mean_f", "sd_f", "target_f", "gap"};
    uint64_t cell = 0;
    for (double beta : betas) {
        for (int n : n_grid) {
            uint64_t cs = detail::cell_seed(seed, cell++);
            ModelParams p(beta, n);
            auto ds = run_replicas(p, 2.0, replicas, RngSpec{cs}, workers);
            double target = beta > 0 ? limiting_free_energy(beta) : kLog2;
            double mean = ds.summary.f_n.mean;
            rep.add_row({beta, static_cast<long long>(n), replicas,
                         static_cast<long long>(cs), mean, std::sqrt(ds.summary.f_n.variance),
                         target, std::abs(mean - target)});
        }
    }
    return rep;
}

// --- CLT (Thm-3-style fluctuation statistic) --------------------------------

inline StudyReport clt_study(double beta, Regime regime, int n, long long replicas,
                             uint64_t seed, int workers = 1) {
    check_regime(beta, regime);
    if (!(beta < kBetaCrit + 1e-12))
        throw std::domain_error("clt_study: requires beta <= beta_crit");
    StudyReport rep;
    rep.kind = "clt";
    rep.seed = seed;
    rep.columns = {"beta", "n", "replicas", "cell_seed", "var_w", "s2_target", "var_se",
                   "ks_s2", "critical", "ks_half", "ks_one"};
    ModelParams p(beta, n);
    uint64_t cs = detail::cell_seed(seed, 0);
    auto ds = run_replicas(p, 2.0, replicas, RngSpec{cs}, workers);
    auto w = detail::extract(ds.records, &ReplicaRecord::w_log);

    double var = ds.summary.w_log.variance;
    double mean = ds.summary.w_log.mean;
    // standard error of the sample variance from the fourth central moment
    double m4 = 0.0;
    for (double v : w) m4 += std::pow(v - mean, 4);
    m4 /= static_cast<double>(w.size());
    double var_se = std::sqrt(std::max(m4 - var * var, 0.0) / static_cast<double>(w.size()));

    double s2 = detail::untruncated_s2(p);
    double ks = ks_distance(w, s2);
    bool critical = regime == Regime::Critical;
    double ks_half = critical ? ks_distance(w, 0.5) : 0.0;
    double ks_one = critical ? ks_distance(w, 1.0) : 0.0;
    rep.add_row({beta, static_cast<long long>(n), replicas, static_cast<long long>(cs),
                 var, s2, var_se, ks, critical, ks_half, ks_one});
    return rep;
}

// --- Moderate-deviation tails -----------------------------------------------

inline StudyReport tail_study(double beta, const std::vector<int>& n_grid, double t,
                              const std::vector<double>& x_grid, long long replicas,
                              uint64_t seed, int workers = 1) {
    StudyReport rep;
    rep.kind = "tails";
    rep.seed = seed;
    rep.columns = {"beta", "n", "t", "x", "side", "hits", "total", "p_hat", "wilson_lo",
                   "wilson_hi", "norm_log_p", "norm_defined", "gauss_log_tail",
                   "chernoff_bound", "trunc_hits", "chernoff_upper_bound_ok"};
    uint64_t cell = 0;
    for (int n : n_grid) {
        ModelParams p(beta, n);
        uint64_t cs = detail::cell_seed(seed, cell++);
        auto ds = run_replicas(p, t, replicas, RngSpec{cs}, workers);
        double s_n = std::sqrt(detail::untruncated_s2(p));
        auto spec = truncation_spec(p, t);
        for (double x : x_grid) {
            double thr = x * t;
            for (int side = 0; side < 2; ++side) {
                long long hits = 0;
                for (const auto& r : ds.records) {
                    if (side == 0 ? (r.w_log > thr) : (r.w_log < -thr)) ++hits;
                }
                TailEstimate e = tail_estimate(thr, hits, replicas, t * t);
                double glt = (thr > 0) ? log_gauss_tail(thr / s_n) : log_gauss_tail(0.0);
                double cb = chernoff_bound(spec, side == 0 ? x : -x);
                // when no replica hit the truncation cap the Chernoff bound
                // must sit above the normalized Wilson upper limit
                bool cb_ok = true;
                if (ds.summary.trunc_hits == 0 && e.wilson_hi > 0 && e.wilson_hi < 1)
                    cb_ok = cb >= std::log(e.wilson_hi) / (t * t);
                rep.add_row({beta, static_cast<long long>(n), t, x,
                             std::string(side == 0 ? "upper" : "lower"), hits, replicas,
                             e.p_hat, e.wilson_lo, e.wilson_hi, e.norm_log_p, e.defined,
                             glt, cb, ds.summary.trunc_hits, cb_ok});
            }
        }
    }
    return rep;
}

// --- Exponential-equivalence diagnostics (the two lemmas) -------------------

inline StudyReport equivalence_study(double beta, const std::vector<int>& n_grid, double t,
                                     long long replicas, uint64_t seed, int workers = 1) {
    StudyReport rep;
    rep.kind = "equiv";
    rep.seed = seed;
    rep.columns = {"beta", "n", "t", "replicas", "cell_seed",
                   "max_log_linear_diff", "q999_log_linear_diff", "lemma1_violations",
                   "max_linear_trunc_diff", "wtrunc_mismatch", "trunc_hits", "trunc_freq",
                   "trunc_wilson_lo", "trunc_wilson_hi", "trunc_exact_p",
                   "rate_exact", "rate_predicted"};
    uint64_t cell = 0;
    for (int n : n_grid) {
        ModelParams p(beta, n);
        uint64_t cs = detail::cell_seed(seed, cell++);
        auto ds = run_replicas(p, t, replicas, RngSpec{cs}, workers);
        double fsl = fluct_scale_log(p);

        double maxd = 0.0, maxlt = 0.0;
        long long lemma1_viol = 0, wtrunc_mismatch = 0;
        std::vector<double> diffs;
        diffs.reserve(ds.records.size());
        for (const auto& r : ds.records) {
            double d = std::abs(r.w_log - r.w_linear);
            diffs.push_back(d);
            maxd = std::max(maxd, d);
            if (r.t_dev >= -0.5) {
                double bound = r.w_linear * r.w_linear * std::exp(-fsl);
                if (d > bound * (1.0 + 1e-12) + 1e-300) ++lemma1_viol;
            }
            maxlt = std::max(maxlt, std::abs(r.w_linear - r.w_trunc));
            if (!r.trunc_hit && r.w_trunc != r.w_linear) ++wtrunc_mismatch;
        }
        std::sort(diffs.begin(), diffs.end());
        double q999 = diffs.empty() ? 0.0
                                    : diffs[static_cast<std::size_t>(
                                          0.999 * (static_cast<double>(diffs.size()) - 1))];

        auto spec = truncation_spec(p, t);
        // P(some sigma exceeds the cap) = 1 - (1 - Phibar(c))^{2^N}, stably
        double lt = log_gauss_tail(spec.c);
        double exact_p = -std::expm1(std::exp(static_cast<double>(p.n) * kLog2) *
                                     std::log1p(-std::exp(lt)));
        auto [wl, wh] = wilson_interval(ds.summary.trunc_hits, replicas);
        auto [re, rp] = truncation_event_rate(spec);
        rep.add_row({beta, static_cast<long long>(n), t, replicas, static_cast<long long>(cs),
                     maxd, q999, lemma1_viol, maxlt, wtrunc_mismatch, ds.summary.trunc_hits,
                     static_cast<double>(ds.summary.trunc_hits) / static_cast<double>(replicas),
                     wl, wh, exact_p, re, rp});
    }
    return rep;
}

// --- Overscaling (t_N = sqrt(N)) --------------------------------------------

inline StudyReport overscaling_study(double beta, const std::vector<int>& n_grid,
                                     long long replicas, uint64_t seed, int workers = 1,
                                     double gamma_exponent = 0.8) {
    if (!(beta < kBetaCrit)) throw std::domain_error("overscaling_study: requires beta < beta_crit");
    StudyReport rep;
    rep.kind = "overscale";
    rep.seed = seed;
    rep.columns = {"beta", "n", "t", "x", "threshold", "hits", "total", "p_hat",
                   "wilson_lo", "wilson_hi", "gamma", "log_p_over_gamma", "defined",
                   "gauss_log_tail"};
    uint64_t cell = 0;
    for (int n : n_grid) {
        ModelParams p(beta, n);
        double t = std::sqrt(static_cast<double>(n));
        double gamma = std::pow(static_cast<double>(n), gamma_exponent);
        uint64_t cs = detail::cell_seed(seed, cell++);
        auto ds = run_replicas(p, t, replicas, RngSpec{cs}, workers);
        double s_n = std::sqrt(detail::untruncated_s2(p));
        for (double x : {0.0, 0.5, 1.0}) {
            double thr = x * t;
            long long hits = 0;
            for (const auto& r : ds.records)
                if (r.w_log > thr) ++hits;
            TailEstimate e = tail_estimate(thr, hits, replicas, gamma);
            rep.add_row({beta, static_cast<long long>(n), t, x, thr, hits, replicas, e.p_hat,
                         e.wilson_lo, e.wilson_hi, gamma, e.norm_log_p, e.defined,
                         log_gauss_tail(thr / s_n)});
        }
    }
    return rep;
}

// --- Exploratory LDP spot check ---------------------------------------------

inline StudyReport ldp_spot_check(double beta, int n, double delta, long long replicas,
                                  uint64_t seed, int workers = 1) {
    if (!(delta > 0)) throw std::domain_error("ldp_spot_check: delta must be positive");
    if (n > 16) throw std::domain_error("ldp_spot_check: exploratory check is for N <= 16");
    StudyReport rep;
    rep.kind = "ldp-check";
    rep.seed = seed;
    rep.columns = {"beta", "n", "delta", "replicas", "side", "hits", "p_hat", "rate_empirical",
                   "rate_defined", "rate_theory", "ratio"};
    ModelParams p(beta, n);
    uint64_t cs = detail::cell_seed(seed, 0);
    auto ds = run_replicas(p, 2.0, replicas, RngSpec{cs}, workers);
    double f = limiting_free_energy(beta);

    for (int side = 0; side < 2; ++side) {
        double thr = side == 0 ? f + delta : f - delta;
        long long hits = 0;
        for (const auto& r : ds.records)
            if (side == 0 ? (r.f_n >= thr) : (r.f_n <= thr)) ++hits;
        double p_hat = static_cast<double>(hits) / static_cast<double>(replicas);
        bool defined = hits > 0;
        double rate_emp = defined ? -std::log(p_hat) / n : 0.0;
        ExtReal rate = ldp_rate(beta, thr);
        double rate_v = rate.finite ? rate.v : std::numeric_limits<double>::max();
        double ratio = (defined && rate.finite && rate.v > 0) ? rate_emp / rate.v : 0.0;
        rep.add_row({beta, static_cast<long long>(n), delta, replicas,
                     std::string(side == 0 ? "upper" : "lower"), hits, p_hat, rate_emp,
                     defined, rate.finite ? rate_v : -1.0, ratio});
    }
    return rep;
}

}  // namespace remlab
