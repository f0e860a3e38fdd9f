#pragma once

// Deterministic finite-N analysis of the truncated summand
// Y(x) = (e^{beta sqrt(N) x} - e^{N beta^2/2}) / e^{N beta^2}, truncated at
// 2^{N/2}/t: the truncation threshold c_N(beta), truncated moments, the
// finite-N scaled cumulant generating function, its Chernoff transform, and
// the union-bound truncation-event rate. Every moment has a closed-form path
// (log-domain with sign bookkeeping) and an independent quadrature path.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "remlab/gauss.hpp"
#include "remlab/numeric.hpp"
#include "remlab/quadrature.hpp"
#include "remlab/theory.hpp"

namespace remlab {

struct TruncationSpec {
    ModelParams params;
    double t;              // truncation parameter t_N
    double threshold_log;  // log(2^{N/2}/t), cap on Y
    double c;              // x-threshold: Y(x) <= 2^{N/2}/t iff x <= c
    double c_asymptotic;   // two-term expansion sqrt(N)(beta + log2/(2 beta)) - log t/(beta sqrt(N))
};

// Exact c_N(beta) = (1/(beta sqrt(N))) log(e^{N beta^2} 2^{N/2}/t + e^{N beta^2/2}),
// assembled by log-sum-exp.
inline TruncationSpec truncation_spec(const ModelParams& p, double t) {
    if (!(t > 0)) throw std::domain_error("truncation_spec: t must be positive");
    if (p.beta == 0.0) {
        // Y is identically 0; no x can exceed the cap.
        double inf = std::numeric_limits<double>::infinity();
        return {p, t, 0.5 * p.n * kLog2 - std::log(t), inf, inf};
    }
    double nb2 = p.n * p.beta * p.beta;
    double thr_log = 0.5 * p.n * kLog2 - std::log(t);
    double c = log_add(nb2 + thr_log, 0.5 * nb2) / (p.beta * p.sqrt_n());
    double c_asym = p.sqrt_n() * (p.beta + kLog2 / (2.0 * p.beta)) -
                    std::log(t) / (p.beta * p.sqrt_n());
    return {p, t, thr_log, c, c_asym};
}

// Variance of T = (Z - EZ)/EZ: (e^{N beta^2} - 1)/2^N.
inline double t_second_moment(const ModelParams& p) {
    double nb2 = p.n * p.beta * p.beta;
    double lg = p.n * kLog2;
    if (nb2 > 30.0) return std::exp(nb2 - lg);  // the -1 is below 1 ulp
    return std::expm1(nb2) * std::exp(-lg);
}

enum class MomentMethod { ClosedForm, Quadrature };

struct MomentReport {
    double m1;        // E Y^t
    double m2;        // E (Y^t)^2
    double m3abs;     // E |Y^t|^3
    double m1_scaled; // t^{-1} 2^{N/2} m1
    double m3_scaled; // t 2^{-N/2} m3abs
    double s2;        // untruncated variance 1 - e^{-N beta^2}
    MomentMethod method;
    bool cancellation_fallback = false;
};

namespace detail {

// log Phi(y) = log P(N(0,1) <= y)
inline double log_gauss_cdf(double y) { return log_gauss_tail(-y); }

// Adds s * e^{pref} * (Phi(b - j*bsn) - Phi(a - j*bsn)) to the accumulator;
// a may be -infinity.
inline void add_interval_term(SignedLogSum& acc, int s, double pref, int j, double bsn,
                              double a, double b) {
    double lb = log_gauss_cdf(b - j * bsn);
    if (std::isinf(a) && a < 0) {
        acc.add(s, pref + lb);
        return;
    }
    double la = log_gauss_cdf(a - j * bsn);
    if (lb <= la) return;  // zero-width up to rounding
    acc.add(s, pref + log_sub(lb, la));
}

struct SignedLogTerm { int sign; double log_abs; };

// E[Y^k; a < X <= b] for k = 1,2,3 via truncated exponential moments
// E[e^{j beta sqrt(N) X}; ...] = e^{j^2 N beta^2/2} (Phi(b - j bsn) - Phi(a - j bsn)).
inline SignedLogSum truncated_power_moment(const ModelParams& p, int k, double a, double b) {
    double nb2 = p.n * p.beta * p.beta;
    double bsn = p.beta * p.sqrt_n();
    SignedLogSum acc;
    // Y^k = e^{-k N beta^2} sum_j C(k,j) (-1)^{k-j} e^{j beta sqrt(N) X} e^{(k-j) N beta^2/2}
    static const int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    for (int j = 0; j <= k; ++j) {
        int s = ((k - j) % 2 == 0) ? 1 : -1;
        double pref = -k * nb2 + std::log(static_cast<double>(binom[k][j])) +
                      0.5 * j * j * nb2 + 0.5 * (k - j) * nb2;
        add_interval_term(acc, s, pref, j, bsn, a, b);
    }
    return acc;
}

}  // namespace detail

// The centered, normalized summand Y(x) and its truncated version.
inline double y_of_x(const ModelParams& p, double x) {
    double nb2 = p.n * p.beta * p.beta;
    return std::exp(-0.5 * nb2) * std::expm1(p.beta * p.sqrt_n() * x - 0.5 * nb2);
}

inline MomentReport truncated_moments(const TruncationSpec& spec, MomentMethod method) {
    const ModelParams& p = spec.params;
    double nb2 = p.n * p.beta * p.beta;
    double x0 = 0.5 * p.beta * p.sqrt_n();  // sign change of Y
    double s2 = -std::expm1(-nb2);
    const double neg_inf = -std::numeric_limits<double>::infinity();

    double m1 = 0, m2 = 0, m3 = 0;
    int m1_sign = 0, m3_sign = 0;
    double m1_log = neg_inf, m3_log = neg_inf;
    bool fallback = false;

    if (method == MomentMethod::ClosedForm) {
        // m1 regrouped as a difference of Gaussian tails,
        //   m1 = -e^{-N b^2/2} (Phibar(c - bsn) - Phibar(c));
        // the CDF-based binomial assembly cancels catastrophically once N b^2
        // is large, while the tail difference stays well-conditioned.
        double bsn = p.beta * p.sqrt_n();
        double m1_bits = 0.0;
        if (std::isfinite(spec.c) && bsn > 0) {
            double lt1 = log_gauss_tail(spec.c - bsn);
            double lt2 = log_gauss_tail(spec.c);
            if (lt1 > lt2) {
                double ld = log_sub(lt1, lt2);
                m1_sign = -1;
                m1_log = -0.5 * nb2 + ld;
                m1_bits = (lt1 - ld) / kLog2;
            }
        }
        SignedLogSum a2 = detail::truncated_power_moment(p, 2, neg_inf, spec.c);
        // |Y|^3 = -Y^3 on X <= x0, +Y^3 on x0 < X <= c
        SignedLogSum a3;
        {
            SignedLogSum left = detail::truncated_power_moment(p, 3, neg_inf, std::min(x0, spec.c));
            a3.add(-left.sign(), left.log_abs());
            if (spec.c > x0) {
                SignedLogSum right = detail::truncated_power_moment(p, 3, x0, spec.c);
                a3.add(right.sign(), right.log_abs());
            }
        }
        double bits = std::max({m1_bits, a2.cancellation_bits(),
                                a3.cancellation_bits()});
        if (bits > 40.0) {
            fallback = true;
        } else {
            m1 = m1_sign * std::exp(m1_log);
            m2 = a2.value();
            m3 = a3.value();
            m3_sign = a3.sign();
            m3_log = a3.log_abs();
        }
    }
    if (method == MomentMethod::Quadrature || fallback) {
        auto phi = [](double x) { return std::exp(log_gauss_pdf(x)); };
        auto mk = [&](int k, bool absval) {
            auto f = [&, k, absval](double x) {
                double y = y_of_x(p, x);
                double v = y * y;
                if (k == 1) v = y;
                if (k == 3) v = absval ? std::abs(y) * y * y : y * y * y;
                return v * phi(x);
            };
            return integrate(f, neg_inf, spec.c, 1e-11, {x0}).value;
        };
        m1 = mk(1, false);
        m2 = mk(2, false);
        m3 = mk(3, true);
    }

    double lsc = 0.5 * p.n * kLog2 - std::log(spec.t);  // log(2^{N/2}/t)
    MomentReport r;
    r.m1 = m1;
    r.m2 = m2;
    r.m3abs = m3;
    bool have_logs = method == MomentMethod::ClosedForm && !fallback;
    // scale in the log domain when available: m1 can sit far below the range
    // where m1 * exp(lsc) survives the intermediate rounding
    r.m1_scaled = have_logs ? m1_sign * std::exp(m1_log + lsc) : m1 * std::exp(lsc);
    r.m3_scaled = have_logs ? m3_sign * std::exp(m3_log - lsc) : m3 * std::exp(-lsc);
    r.s2 = s2;
    r.method = fallback ? MomentMethod::Quadrature : method;
    r.cancellation_fallback = fallback;
    return r;
}

// t^{-2} 2^N (E[e^{eps Y^t}] - 1) with eps = lambda t 2^{-N/2}, computed from
// the expm1-compensated integrand. Integrating e^{eps Y} - 1 in doubles would
// lose the entire signal: eps is of order 2^{-N/2} and the prefactor 2^N
// amplifies every cancelled bit.
inline double scgf_increment(const TruncationSpec& spec, double lambda) {
    if (std::abs(lambda) > 64.0) throw std::domain_error("scgf_increment: |lambda| > 64");
    if (lambda == 0.0) return 0.0;
    const ModelParams& p = spec.params;
    double log_scale = 0.5 * p.n * kLog2;  // log 2^{N/2}
    double eps = lambda * spec.t * std::exp(-log_scale);
    double x0 = 0.5 * p.beta * p.sqrt_n();
    auto f = [&](double x) {
        return std::expm1(eps * y_of_x(p, x)) * std::exp(log_gauss_pdf(x));
    };
    const double neg_inf = -std::numeric_limits<double>::infinity();
    QuadratureResult q = integrate(f, neg_inf, spec.c, 1e-10, {x0});
    return q.value * std::exp(2.0 * log_scale) / (spec.t * spec.t);
}

// Exact finite-N normalized log-MGF: t^{-2} 2^N log(1 + increment t^2/2^N).
inline double finite_scgf(const TruncationSpec& spec, double lambda) {
    double inc = scgf_increment(spec, lambda);
    double scale = std::exp(spec.params.n * kLog2) / (spec.t * spec.t);  // 2^N/t^2
    double x = inc / scale;
    if (!(x > -1.0)) throw std::logic_error("finite_scgf: MGF increment <= -1");
    return scale * std::log1p(x);
}

// inf over the admissible half-line of finite_scgf(lambda) - lambda x, by
// golden-section search on [-64, 64]; upper-bounds t^{-2} log P(+-stat >= +-x).
inline double chernoff_bound(const TruncationSpec& spec, double x) {
    double lo = (x >= 0) ? 0.0 : -64.0;
    double hi = (x >= 0) ? 64.0 : 0.0;
    auto h = [&](double lam) { return finite_scgf(spec, lam) - lam * x; };
    const double gr = 0.6180339887498948482;
    double a = lo, b = hi;
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = h(c1), f2 = h(c2);
    int iters = 0;
    while (b - a > 1e-8) {
        if (++iters > 200)
            throw std::runtime_error("chernoff_bound: optimizer failed to converge");
        if (f1 < f2) {
            b = c2; c2 = c1; f2 = f1;
            c1 = b - gr * (b - a);
            f1 = h(c1);
        } else {
            a = c1; c1 = c2; f1 = f2;
            c2 = a + gr * (b - a);
            f2 = h(c2);
        }
    }
    return std::min({f1, f2, h(lo)});  // lambda at the boundary is admissible
}

// Lemma-2-style truncation-event rate on the scale t^2:
//   exact     = t^{-2} log(2^N Phibar(c_N))
//   predicted = -N/(2 t^2) (beta - log2/(2 beta))^2 - log(N)/(2 t^2)
inline std::pair<double, double> truncation_event_rate(const TruncationSpec& spec) {
    const ModelParams& p = spec.params;
    double t2 = spec.t * spec.t;
    double exact = (p.n * kLog2 + log_gauss_tail(spec.c)) / t2;
    double coef = p.beta - kLog2 / (2.0 * p.beta);
    double predicted = -(p.n / (2.0 * t2)) * coef * coef -
                       std::log(static_cast<double>(p.n)) / (2.0 * t2);
    return {exact, predicted};
}

}  // namespace remlab
