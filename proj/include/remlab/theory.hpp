#pragma once

// Closed-form limiting quantities of the REM free energy: the limiting and
// annealed free energies, the large- and moderate-deviation rate functions,
// the limiting scaled cumulant generating function, the fluctuation scale and
// the classification of moderate-deviation scalings.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "remlab/numeric.hpp"

namespace remlab {

// beta_c = sqrt(2 log 2): freezing transition of the free energy.
inline constexpr double kBetaC = 1.1774100225154746910115693264597000;
// beta_crit = sqrt(log 2 / 2): Gaussian/non-Gaussian fluctuation transition.
inline constexpr double kBetaCrit = 0.5887050112577373455057846632298500;

// Floating-point beta cannot decide beta == beta_crit; the caller states it.
enum class Regime { Subcritical, Critical };

struct ModelParams {
    double beta;
    int n;

    // beta = 0 is admitted for the simulator (Z = 2^N exactly); the
    // closed-form beta-only operations still reject it.
    ModelParams(double beta_, int n_) : beta(beta_), n(n_) {
        if (!(beta >= 0)) throw std::domain_error("ModelParams: beta must be nonnegative");
        if (n < 1) throw std::domain_error("ModelParams: n must be >= 1");
    }
    double sqrt_n() const { return std::sqrt(static_cast<double>(n)); }
};

inline void check_beta(double beta) {
    if (!(beta > 0)) throw std::domain_error("beta must be positive");
}

inline void check_regime(double beta, Regime regime) {
    if (regime == Regime::Critical && std::abs(beta - kBetaCrit) > 1e-12)
        throw std::domain_error("regime CRITICAL claimed but |beta - beta_crit| > 1e-12");
}

// Extended real with an explicit finite/infinite tag; public APIs never hand
// out floating-point infinities.
struct ExtReal {
    bool finite;
    double v;  // meaningful only when finite

    static ExtReal of(double x) { return {true, x}; }
    static ExtReal infinity() { return {false, 0.0}; }
};

enum class RateFunctionKind { Ldp, MdpGaussian, MdpCritical, Degenerate };

enum class ScalingRegime { SubRootN, CriticalLog, Overscaled, Unsupported };

// A rule N -> t_N, either c*N^alpha, c*(log N)^alpha, or an explicit table.
struct ScalingSchedule {
    enum class Form { PowerOfN, PowerOfLogN, Table };
    Form form = Form::PowerOfN;
    double alpha = 0.25;
    double coef = 1.0;
    std::vector<std::pair<int, double>> table;  // (N, t_N), ascending in N
    // Overscaled-regime reporting speed gamma_N = N^gamma_exponent, o(N).
    double gamma_exponent = 0.8;

    double t(int n) const {
        switch (form) {
            case Form::PowerOfN:
                return coef * std::pow(static_cast<double>(n), alpha);
            case Form::PowerOfLogN:
                return coef * std::pow(std::log(static_cast<double>(n)), alpha);
            case Form::Table:
                for (const auto& [tn, tv] : table)
                    if (tn == n) return tv;
                throw std::domain_error("ScalingSchedule: N not present in table");
        }
        throw std::logic_error("ScalingSchedule: bad form");
    }

    double gamma(int n) const { return std::pow(static_cast<double>(n), gamma_exponent); }

    void validate() const {
        if (form == Form::Table) {
            if (table.empty()) throw std::domain_error("ScalingSchedule: empty table");
            for (std::size_t i = 0; i + 1 < table.size(); ++i)
                if (!(table[i + 1].first > table[i].first && table[i + 1].second > table[i].second))
                    throw std::domain_error("ScalingSchedule: table must be strictly increasing");
            for (const auto& [n, tv] : table)
                if (!(tv > 0)) throw std::domain_error("ScalingSchedule: t_N must be positive");
        } else {
            if (!(coef > 0)) throw std::domain_error("ScalingSchedule: coefficient must be positive");
            // alpha = 0 encodes a constant schedule t_N = coef
            if (!(alpha >= 0)) throw std::domain_error("ScalingSchedule: exponent must be nonnegative");
        }
    }
};

// Limiting free energy F(beta): beta^2/2 + log 2 up to beta_c, then beta*beta_c.
inline double limiting_free_energy(double beta) {
    check_beta(beta);
    if (beta <= kBetaC) return 0.5 * beta * beta + kLog2;
    return beta * kBetaC;
}

// Annealed free energy (1/N) log E Z = beta^2/2 + log 2 for all beta.
inline double annealed_free_energy(double beta) {
    check_beta(beta);
    return 0.5 * beta * beta + kLog2;
}

// Rate function of the free-energy LDP at speed N.
inline ExtReal ldp_rate(double beta, double x) {
    check_beta(beta);
    double f = limiting_free_energy(beta);
    if (x < f) return ExtReal::infinity();
    if (x == f) return ExtReal::of(0.0);
    return ExtReal::of(x * x / (2.0 * beta * beta) - kLog2);
}

// Moderate-deviation rate functions.
inline ExtReal mdp_rate(RateFunctionKind kind, double x) {
    switch (kind) {
        case RateFunctionKind::MdpGaussian:
            return ExtReal::of(0.5 * x * x);
        case RateFunctionKind::MdpCritical:
            return ExtReal::of(x * x);
        case RateFunctionKind::Degenerate:
            return x == 0.0 ? ExtReal::of(0.0) : ExtReal::infinity();
        case RateFunctionKind::Ldp:
            throw std::invalid_argument("mdp_rate: LDP kind, use ldp_rate");
    }
    throw std::logic_error("mdp_rate: bad kind");
}

// Limiting SCGF: lambda^2/2 below beta_crit, lambda^2/4 at beta_crit.
inline std::function<double(double)> scgf_limit(double beta, Regime regime) {
    check_beta(beta);
    check_regime(beta, regime);
    if (regime == Regime::Subcritical) {
        if (!(beta < kBetaCrit + 1e-12))
            throw std::domain_error("scgf_limit: unsupported regime beta > beta_crit");
        return [](double lambda) { return 0.5 * lambda * lambda; };
    }
    return [](double lambda) { return 0.25 * lambda * lambda; };
}

// log of the fluctuation scale e^{(N/2)(log 2 - beta^2)}. Kept in log domain;
// the exponential overflows past N ~ 2000 at small beta.
inline double fluct_scale_log(const ModelParams& p) {
    return 0.5 * p.n * (kLog2 - p.beta * p.beta);
}

struct ScalingClass {
    ScalingRegime regime;
    RateFunctionKind rate;  // meaningful unless regime == Unsupported
};

// Classifies a schedule against the moderate-deviation theorem's cases. The
// answer depends only on the schedule form and the regime flag, never on the
// coefficient.
inline ScalingClass classify_scaling(const ScalingSchedule& s, double beta, Regime regime) {
    check_beta(beta);
    check_regime(beta, regime);
    s.validate();
    using Form = ScalingSchedule::Form;
    if (regime == Regime::Critical) {
        // only t_N = o(sqrt(log N)) is covered at beta_crit
        if (s.form == Form::PowerOfLogN && s.alpha < 0.5)
            return {ScalingRegime::CriticalLog, RateFunctionKind::MdpCritical};
        return {ScalingRegime::Unsupported, RateFunctionKind::MdpCritical};
    }
    switch (s.form) {
        case Form::PowerOfLogN:
            return {ScalingRegime::SubRootN, RateFunctionKind::MdpGaussian};
        case Form::PowerOfN:
            if (s.alpha < 0.5) return {ScalingRegime::SubRootN, RateFunctionKind::MdpGaussian};
            return {ScalingRegime::Overscaled, RateFunctionKind::Degenerate};
        case Form::Table:
            // a finite table cannot decide an asymptotic class
            return {ScalingRegime::Unsupported, RateFunctionKind::MdpGaussian};
    }
    throw std::logic_error("classify_scaling: bad form");
}

inline const char* to_string(ScalingRegime r) {
    switch (r) {
        case ScalingRegime::SubRootN: return "SUB_ROOT_N";
        case ScalingRegime::CriticalLog: return "CRITICAL_LOG";
        case ScalingRegime::Overscaled: return "OVERSCALED";
        case ScalingRegime::Unsupported: return "UNSUPPORTED";
    }
    return "?";
}

inline const char* to_string(RateFunctionKind k) {
    switch (k) {
        case RateFunctionKind::Ldp: return "LDP";
        case RateFunctionKind::MdpGaussian: return "MDP_GAUSSIAN";
        case RateFunctionKind::MdpCritical: return "MDP_CRITICAL";
        case RateFunctionKind::Degenerate: return "DEGENERATE";
    }
    return "?";
}

}  // namespace remlab
