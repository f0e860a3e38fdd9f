#pragma once

// Bit-reproducible Monte Carlo over the 2^N configuration energies. Each
// replica is one REM instance: log Z, the normalized deviation T, both
// fluctuation statistics, the truncated sum and truncation flags. Summation
// uses a fixed-shape pairwise tree over 2^16-element leaves (Neumaier inside
// each leaf), so results never depend on the worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "remlab/io.hpp"
#include "remlab/moments.hpp"
#include "remlab/numeric.hpp"
#include "remlab/rng.hpp"
#include "remlab/theory.hpp"

namespace remlab {

inline constexpr int kMaxN = 34;          // runtime guard: ~1.7e10 variates per replica
inline constexpr int kLeafBits = 16;      // leaf size 2^16 sigma per leaf

struct ReplicaRecord {
    long long replica_id;
    double log_z;     // log Z_N(beta)
    double f_n;       // log_z / N
    double t_dev;     // T = Z/EZ - 1
    double w_log;     // fluct scale * log(Z/EZ)
    double w_linear;  // 2^{-N/2} sum Y = fluct scale * T
    double w_trunc;   // 2^{-N/2} sum Y^t
    bool trunc_hit;   // some sigma exceeded the truncation cap
    double max_x;     // max_sigma X_sigma
};

struct SummaryStat {
    double mean = 0.0;
    double variance = 0.0;  // population variance over the dataset
};

struct DatasetSummary {
    long long count = 0;
    SummaryStat f_n, t_dev, w_log, w_linear, w_trunc;
    long long trunc_hits = 0;
};

struct ReplicaDataset {
    double beta;
    int n;
    double t;
    uint64_t seed;
    std::vector<ReplicaRecord> records;
    DatasetSummary summary;
};

namespace detail {

struct LeafResult {
    double d_sum = 0.0;       // sum expm1(beta sqrt(N) x - N beta^2/2)
    double dt_sum = 0.0;      // same, restricted to x <= c
    double lse_max = -std::numeric_limits<double>::infinity();
    double lse_sum = 0.0;     // sum e^{v - lse_max} over the leaf
    double max_x = -std::numeric_limits<double>::infinity();
    bool trunc_hit = false;
};

inline LeafResult merge_leaves(const LeafResult& a, const LeafResult& b) {
    LeafResult r;
    r.d_sum = a.d_sum + b.d_sum;
    r.dt_sum = a.dt_sum + b.dt_sum;
    r.lse_max = std::max(a.lse_max, b.lse_max);
    r.lse_sum = a.lse_sum * std::exp(a.lse_max - r.lse_max) +
                b.lse_sum * std::exp(b.lse_max - r.lse_max);
    r.max_x = std::max(a.max_x, b.max_x);
    r.trunc_hit = a.trunc_hit || b.trunc_hit;
    return r;
}

template <class Source>
LeafResult compute_leaf(const Source& src, uint64_t replica_id, uint64_t sigma_lo,
                        uint64_t sigma_hi, double bsn, double shift, double c) {
    LeafResult r;
    CompensatedSum d, dt;
    // Streaming LSE of v = bsn*x: the term e^{v - max} is recovered from the
    // already-computed expm1 value as (1 + em) e^{shift - max}, so the only
    // exp calls happen when the running max moves.
    double rescale = 0.0;
    double x2[2];
    for (uint64_t s = sigma_lo; s < sigma_hi; s += 2) {
        src.pair(replica_id, s, x2);
        for (int i = 0; i < 2; ++i) {
            double x = x2[i];
            double v = bsn * x;
            double em = std::expm1(v - shift);
            d.add(em);
            if (x <= c)
                dt.add(em);
            else
                r.trunc_hit = true;
            if (v > r.lse_max) {
                r.lse_sum *= std::exp(r.lse_max - v);
                r.lse_max = v;
                rescale = std::exp(shift - v);
            }
            r.lse_sum += (1.0 + em) * rescale;
            if (x > r.max_x) r.max_x = x;
        }
    }
    r.d_sum = d.result();
    r.dt_sum = dt.result();
    return r;
}

// Runs fn(i) for i in [0, count) on `workers` threads, fixed block partition.
inline void parallel_for(std::size_t count, int workers,
                         const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    std::size_t w = std::min<std::size_t>(std::max(workers, 1), count);
    if (w == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t k = 0; k < w; ++k) {
        pool.emplace_back([&, k] {
            std::size_t lo = count * k / w, hi = count * (k + 1) / w;
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

// Samples one replica. Pure function of (source, replica_id); the reduction
// tree shape depends only on N.
template <class Source>
ReplicaRecord sample_replica(const ModelParams& p, double t, const Source& src,
                             long long replica_id, int workers = 1) {
    if (p.n > kMaxN) throw std::domain_error("sample_replica: N exceeds the runtime guard");
    if (!(t > 0)) throw std::domain_error("sample_replica: t must be positive");

    const double bsn = p.beta * p.sqrt_n();
    const double shift = 0.5 * p.n * p.beta * p.beta;
    const double c = truncation_spec(p, t).c;
    const uint64_t total = uint64_t{1} << p.n;
    const uint64_t leaf_size = std::min<uint64_t>(total, uint64_t{1} << kLeafBits);
    const std::size_t leaves = static_cast<std::size_t>(total / leaf_size);

    std::vector<detail::LeafResult> leaf(leaves);
    detail::parallel_for(leaves, workers, [&](std::size_t i) {
        uint64_t lo = static_cast<uint64_t>(i) * leaf_size;
        leaf[i] = detail::compute_leaf(src, static_cast<uint64_t>(replica_id), lo,
                                       lo + leaf_size, bsn, shift, c);
    });
    while (leaf.size() > 1) {
        std::vector<detail::LeafResult> next;
        next.reserve(leaf.size() / 2);
        for (std::size_t i = 0; i + 1 < leaf.size(); i += 2)
            next.push_back(detail::merge_leaves(leaf[i], leaf[i + 1]));
        leaf.swap(next);
    }
    const detail::LeafResult& r = leaf[0];

    const double inv_total = std::exp(-p.n * kLog2);
    const double fsl = fluct_scale_log(p);
    ReplicaRecord rec;
    rec.replica_id = replica_id;
    rec.log_z = r.lse_max + std::log(r.lse_sum);
    rec.f_n = rec.log_z / p.n;
    rec.t_dev = r.d_sum * inv_total;
    rec.w_log = std::exp(fsl) * std::log1p(rec.t_dev);
    const double w_scale = std::exp(-0.5 * p.n * kLog2 - shift);  // 2^{-N/2} e^{-N beta^2/2}
    rec.w_linear = w_scale * r.d_sum;
    rec.w_trunc = w_scale * r.dt_sum;
    rec.trunc_hit = r.trunc_hit;
    rec.max_x = r.max_x;
    return rec;
}

namespace detail {

inline SummaryStat summarize(const std::vector<ReplicaRecord>& recs,
                             double ReplicaRecord::*field) {
    SummaryStat s;
    if (recs.empty()) return s;
    std::vector<double> vals(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) vals[i] = recs[i].*field;
    s.mean = pairwise_sum(vals) / static_cast<double>(vals.size());
    for (double& v : vals) {
        double d = v - s.mean;
        v = d * d;
    }
    s.variance = pairwise_sum(vals) / static_cast<double>(vals.size());
    return s;
}

}  // namespace detail

template <class Source>
ReplicaDataset run_replicas(const ModelParams& p, double t, long long count, const Source& src,
                            uint64_t seed, int workers = 1) {
    if (count < 0) throw std::domain_error("run_replicas: count must be >= 0");
    ReplicaDataset ds;
    ds.beta = p.beta;
    ds.n = p.n;
    ds.t = t;
    ds.seed = seed;
    ds.records.resize(static_cast<std::size_t>(count));

    // Large instances parallelize inside a replica; small ones across replicas.
    if (p.n >= kLeafBits + 3) {
        for (long long i = 0; i < count; ++i)
            ds.records[static_cast<std::size_t>(i)] = sample_replica(p, t, src, i, workers);
    } else {
        detail::parallel_for(static_cast<std::size_t>(count), workers, [&](std::size_t i) {
            ds.records[i] = sample_replica(p, t, src, static_cast<long long>(i), 1);
        });
    }

    ds.summary.count = count;
    ds.summary.f_n = detail::summarize(ds.records, &ReplicaRecord::f_n);
    ds.summary.t_dev = detail::summarize(ds.records, &ReplicaRecord::t_dev);
    ds.summary.w_log = detail::summarize(ds.records, &ReplicaRecord::w_log);
    ds.summary.w_linear = detail::summarize(ds.records, &ReplicaRecord::w_linear);
    ds.summary.w_trunc = detail::summarize(ds.records, &ReplicaRecord::w_trunc);
    for (const auto& r : ds.records)
        if (r.trunc_hit) ++ds.summary.trunc_hits;
    return ds;
}

inline ReplicaDataset run_replicas(const ModelParams& p, double t, long long count,
                                   RngSpec rng, int workers = 1) {
    PhiloxGaussianSource src(rng);
    return run_replicas(p, t, count, src, rng.master_seed, workers);
}

// Raw-record dump, one CSV row per replica in replica_id order.
inline std::string dataset_to_csv(const ReplicaDataset& ds) {
    std::string out = "replica_id,log_z,f_n,t_dev,w_log,w_linear,w_trunc,trunc_hit,max_x\n";
    for (const auto& r : ds.records) {
        out += format_int(r.replica_id);
        out += ',';
        out += format_double(r.log_z);
        out += ',';
        out += format_double(r.f_n);
        out += ',';
        out += format_double(r.t_dev);
        out += ',';
        out += format_double(r.w_log);
        out += ',';
        out += format_double(r.w_linear);
        out += ',';
        out += format_double(r.w_trunc);
        out += ',';
        out += (r.trunc_hit ? "1" : "0");
        out += ',';
        out += format_double(r.max_x);
        out += '\n';
    }
    return out;
}

}  // namespace remlab
