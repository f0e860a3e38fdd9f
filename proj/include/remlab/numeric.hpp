#pragma once

// Small numeric building blocks shared across the library: log-domain
// accumulation with sign tracking, compensated (Neumaier) summation and
// fixed-shape pairwise reduction.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace remlab {

inline constexpr double kLog2 = 0.6931471805599453094172321214581766;
inline constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056177;

// log(e^a + e^b), safe for -inf arguments.
inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (std::isinf(b) && b < 0) return a;
    return a + std::log1p(std::exp(b - a));
}

// log(e^a - e^b), requires a > b.
inline double log_sub(double a, double b) {
    if (!(a > b)) throw std::domain_error("log_sub: requires a > b");
    return a + std::log1p(-std::exp(b - a));
}

// Accumulates sum_i s_i * e^{l_i} in log domain. Tracks the largest term so
// callers can detect how many bits of cancellation occurred.
class SignedLogSum {
  public:
    void add(int sign, double log_abs) {
        if (std::isinf(log_abs) && log_abs < 0) return;
        if (sign == 0) return;
        if (sign > 0) {
            pos_ = pos_first_ ? log_add(pos_, log_abs) : log_abs;
            pos_first_ = true;
        } else {
            neg_ = neg_first_ ? log_add(neg_, log_abs) : log_abs;
            neg_first_ = true;
        }
        if (log_abs > max_term_) max_term_ = log_abs;
    }

    // sign in {-1, 0, +1}; log_abs = log|sum| (-inf when sum == 0).
    int sign() const {
        if (!pos_first_ && !neg_first_) return 0;
        if (!neg_first_) return 1;
        if (!pos_first_) return -1;
        if (pos_ == neg_) return 0;
        return pos_ > neg_ ? 1 : -1;
    }
    double log_abs() const {
        if (!pos_first_ && !neg_first_) return -std::numeric_limits<double>::infinity();
        if (!neg_first_) return pos_;
        if (!pos_first_) return neg_;
        if (pos_ == neg_) return -std::numeric_limits<double>::infinity();
        return pos_ > neg_ ? log_sub(pos_, neg_) : log_sub(neg_, pos_);
    }
    double value() const { return sign() * std::exp(log_abs()); }

    // Bits lost to cancellation between the largest term and the result.
    double cancellation_bits() const {
        int s = sign();
        if (s == 0) return std::numeric_limits<double>::infinity();
        return (max_term_ - log_abs()) / kLog2;
    }

  private:
    double pos_ = 0, neg_ = 0;
    double max_term_ = -std::numeric_limits<double>::infinity();
    bool pos_first_ = false, neg_first_ = false;
};

// Neumaier compensated accumulator.
class CompensatedSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double result() const { return sum_ + comp_; }

  private:
    double sum_ = 0, comp_ = 0;
};

// Reduces values[0..n) with a fixed binary-tree shape that depends only on n.
// Used wherever bit-reproducibility across worker counts is required.
inline double pairwise_sum(std::span<const double> values) {
    if (values.empty()) return 0.0;
    std::vector<double> level(values.begin(), values.end());
    while (level.size() > 1) {
        std::size_t half = level.size() / 2;
        std::vector<double> next;
        next.reserve(half + (level.size() & 1));
        for (std::size_t i = 0; i < half; ++i) next.push_back(level[2 * i] + level[2 * i + 1]);
        if (level.size() & 1) next.push_back(level.back());
        level.swap(next);
    }
    return level[0];
}

}  // namespace remlab
