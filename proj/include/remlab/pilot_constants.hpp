#pragma once

// Frozen pilot-derived seeds and tolerances for the acceptance suite. Every
// number below was produced once by the recorded run and then frozen; the
// acceptance binary replays the same seeds, so these are deterministic
// expectations, not statistical hopes. Pilot box: single-core x86-64, this
// tree built -O2; all runs bit-identical for any worker count by design.

#include <cstdint>

namespace remlab::pilot {

// --- seeds ------------------------------------------------------------------
// Chosen once (777001..) before looking at any outcome; not tuned per
// criterion beyond the first pick.

// shared dataset (beta=0.3, N=16, t=2, R=4e5); criteria 5-9 read it
inline constexpr uint64_t kSeedMain = 777001;
// overscaling comparison cell (beta=0.3, N=9, t=3, R=1e5)
inline constexpr uint64_t kSeedOverscaleN9 = 777002;
// LLN cells at N = 8, 16, 24 (beta=0.3, R=1e3 each)
inline constexpr uint64_t kSeedLlnCells[3] = {777003, 777004, 777005};
// beta = 0 exactness cell
inline constexpr uint64_t kSeedLlnBeta0 = 777006;
// exploratory LDP spot check (beta=1, N=12, delta=0.3)
inline constexpr uint64_t kSeedLdp = 777007;
// critical-beta diagnostic cell (beta_crit, N=20, t=2)
inline constexpr uint64_t kSeedCritical = 777008;

// --- replica counts ---------------------------------------------------------

inline constexpr long long kTailReplicas = 400000;   // criterion 6 (full set)
inline constexpr long long kCltReplicas = 100000;    // criteria 5, 8, 9 (prefix)
inline constexpr long long kCriticalReplicas = 2000; // diagnostics only
inline constexpr long long kLdpReplicas = 300000;    // 153 hits in the pilot

// --- tolerances -------------------------------------------------------------

// SCGF gap bound at N=80, t=N^0.3, lambda in {-2,-1,1,2}. The bound 0.05 is
// the pinned criterion value; the deterministic pilot
//   (quadrature, no seed) measured gaps 0.370512 (N=20), 0.0554881 (N=40),
//   0.00152353 (N=80), so the margin at N=80 is ~30x.
inline constexpr double kScgfGapMaxAtN80 = 0.05;

// KS bound for w_log vs N(0, s_N^2) at (beta=0.3, N=16, R=1e5, seed 777001):
// pilot measured KS = 0.00361 and |var - s_N^2| = 0.32 standard errors
// (var 0.76199506 vs s_N^2 0.76307224). Bound pinned at 0.02.
inline constexpr double kCltKsMax = 0.02;

// --- pilot observations (frozen for reference, asserted loosely or not at
// --- all; the acceptance binary recomputes everything from the seeds) -------
//
// generating run: a one-file driver calling
//   run_replicas({0.3,16}, t=2, R=4e5, seed=777001, workers=1)
// plus the cells listed above; equivalent CLI commands:
//   remlab simulate --beta 0.3 --n-grid 16 --schedule power:0:2 \
//          --replicas 400000 --seed 777001 --workers 1
//   remlab lln --beta 0.3 --n-grid 8 --replicas 1000 --seed 777003   (etc.)
//
//   criterion 6: hits 4561/400000, p_hat 0.0114025,
//     wilson [0.0110781, 0.0117362], comparator band [0.00551208, 0.0220483]
//   criterion 7: 0 violations of the per-replica inequality in 400000
//   criterion 8: trunc_hits 523/100000, freq 0.00523,
//     wilson [0.00480156, 0.00569646] covering exact 0.00506609
//   criterion 9: hits 2217 (N=9), 1145 (N=16);
//     normalized values -0.65678 (N=9), -0.48639 (N=16) -- see the defect
//     analysis in tests/acceptance.cpp: the claimed decrease is false at
//     these N and the Monte Carlo numbers match the deterministic Gaussian
//     comparator to three digits
//   criterion 11: gaps 7.53917e-4 (N=8), 3.0307e-6 (N=16), 6.69667e-7 (N=24);
//     strictly decreasing. Note: by N=16 the systematic bias is already below
//     the Monte Carlo noise floor (~2.6e-4 at R=1e3), so the N=16 -> N=24
//     decrease is a property of these frozen seeds, not of the bias.
//   criterion 12: 153 hits at R=3e5, empirical rate 0.631758 vs theory
//     0.421597, ratio 1.4985 (inside [1/3, 3])

}  // namespace remlab::pilot
