// Copyright 2026 The btomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BTOMO_VERIFY_HPP
#define BTOMO_VERIFY_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "btomo/experiments.hpp"

// End-to-end verification of the toolkit: eleven checks covering the forward
// model, the estimator, the gauge freedom, the integrator, and the tomography
// pipeline.  Every tolerance is pinned here; a report is rendered from
// numbers only (no timestamps, no measured durations), so two runs with the
// same seed must produce byte-identical text, and the last criterion checks
// exactly that.

namespace btomo {

struct CriterionResult {
    int number = 0;
    std::string name;
    bool passed = false;
    std::string detail;  // deterministic one-line summary of the numbers
    std::string extra;   // optional multi-line block (the derivative matrix)
};

namespace verify_detail {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline PulseErrorParams random_params(RandomStream& rng, double scale) {
    std::array<double, PulseErrorParams::kCount> a{};
    for (double& v : a) {
        v = scale * (2.0 * rng.next_unit() - 1.0);
    }
    return PulseErrorParams::from_array(a);
}

// Perfect pulses must produce no signal at all: every sequence ends in the
// initial state up to the designed readout, so any nonzero value is model
// error, not statistics.
inline CriterionResult criterion_zero_signals() {
    const auto t0 = std::chrono::steady_clock::now();
    const SignalVector sv = simulate_all(PulseErrorParams{});
    double worst = 0.0;
    for (double v : sv.values) {
        worst = std::max(worst, std::abs(v));
    }
    const bool in_budget = seconds_since(t0) < 1.0;
    CriterionResult r;
    r.number = 1;
    r.name = "zero-error pulses produce zero signals";
    r.passed = worst <= 1e-12 && in_budget;
    r.detail = "max |signal| = " + num(worst) + " (tol 1e-12); within 1 s: " + yes_no(in_budget);
    return r;
}

// Central differences of the exact signals around zero error, against the
// tabulated first-order coefficients.  Nonzero entries must match within 1%
// relative and in sign; entries tabulated as zero must differentiate to
// (numerically) zero at the same 1e-2 scale.
inline CriterionResult criterion_design_matrix() {
    const double delta = 1e-4;
    Matrix12 numeric = Matrix12::Zero();
    for (int k = 0; k < PulseErrorParams::kCount; ++k) {
        std::array<double, PulseErrorParams::kCount> plus{};
        std::array<double, PulseErrorParams::kCount> minus{};
        plus[k] = delta;
        minus[k] = -delta;
        const SignalVector sp = simulate_all(PulseErrorParams::from_array(plus));
        const SignalVector sm = simulate_all(PulseErrorParams::from_array(minus));
        for (int j = 0; j < kSequenceCount; ++j) {
            numeric(j, k) = (sp.values[j] - sm.values[j]) / (2.0 * delta);
        }
    }

    const Matrix12& table = design_matrix();
    double worst_rel = 0.0;
    double worst_zero = 0.0;
    bool signs_ok = true;
    for (int j = 0; j < kSequenceCount; ++j) {
        for (int k = 0; k < PulseErrorParams::kCount; ++k) {
            const double t = table(j, k);
            const double n = numeric(j, k);
            if (t != 0.0) {
                worst_rel = std::max(worst_rel, std::abs(n - t) / std::abs(t));
                if (n * t <= 0.0) {
                    signs_ok = false;
                }
            } else {
                worst_zero = std::max(worst_zero, std::abs(n));
            }
        }
    }

    // Comparison matrix: numeric derivative with the tabulated coefficient in
    // parentheses, one row per sequence in protocol order.
    std::string block = "      ";
    for (const char* name : PulseErrorParams::names()) {
        char cell[24];
        std::snprintf(cell, sizeof(cell), " %11s", name);
        block += cell;
    }
    block += "\n";
    for (int j = 0; j < kSequenceCount; ++j) {
        char head[16];
        std::snprintf(head, sizeof(head), "%-6s", sequence_name(static_cast<SequenceId>(j)));
        block += head;
        for (int k = 0; k < PulseErrorParams::kCount; ++k) {
            char cell[32];
            std::snprintf(cell, sizeof(cell), " %+7.4f(%+.0f)", numeric(j, k), table(j, k));
            block += cell;
        }
        block += "\n";
    }

    CriterionResult r;
    r.number = 2;
    r.name = "numeric signal derivatives match tabulated coefficients";
    r.passed = worst_rel <= 1e-2 && worst_zero <= 1e-2 && signs_ok;
    r.detail = "max relative deviation (nonzero entries) = " + num(worst_rel) +
               ", max |derivative| (zero entries) = " + num(worst_zero) +
               ", all signs match: " + yes_no(signs_ok);
    r.extra = block;
    return r;
}

// The closed-form estimate carries a quadratic model error, so halving the
// error scale must shrink the worst-case deviation from the gauge-fixed
// truth by nearly 4x.  The 3.5x floor leaves room for the odd cubic term.
inline CriterionResult criterion_estimator_convergence(uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    RandomStream rng(seed, 3);
    const std::array<double, 4> scales = {0.08, 0.04, 0.02, 0.01};
    std::array<double, 4> worst{};
    for (size_t s = 0; s < scales.size(); ++s) {
        for (int trial = 0; trial < 200; ++trial) {
            const PulseErrorParams p = random_params(rng, scales[s]);
            const auto est = estimate(simulate_all(p)).params.to_array();
            const auto ref = gauge_fix(p).to_array();
            for (int k = 0; k < PulseErrorParams::kCount; ++k) {
                worst[s] = std::max(worst[s], std::abs(est[k] - ref[k]));
            }
        }
    }
    const double r01 = worst[0] / worst[1];
    const double r12 = worst[1] / worst[2];
    const double r23 = worst[2] / worst[3];
    const bool ratios_ok = r01 >= 3.5 && r12 >= 3.5 && r23 >= 3.5;
    const bool in_budget = seconds_since(t0) < 10.0;

    CriterionResult r;
    r.number = 3;
    r.name = "estimator error shrinks quadratically with error scale";
    r.passed = ratios_ok && worst[2] <= 2e-3 && in_budget;
    r.detail = "max error at scale 0.08/0.04/0.02/0.01 = " + num(worst[0]) + " / " + num(worst[1]) +
               " / " + num(worst[2]) + " / " + num(worst[3]) + "; halving ratios = " + num(r01) +
               ", " + num(r12) + ", " + num(r23) + "; within 10 s: " + yes_no(in_budget);
    return r;
}

// The gauge transformation redistributes in-plane axis errors between the
// x and y pulse families without touching any observable, so all twelve
// signals must be bit-level identical up to rounding.
inline CriterionResult criterion_gauge_invariance(uint64_t seed) {
    RandomStream rng(seed, 4);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const PulseErrorParams p = random_params(rng, 0.1);
        const SignalVector a = simulate_all(p);
        const SignalVector b = simulate_all(gauge_fix(p));
        for (int k = 0; k < kSequenceCount; ++k) {
            worst = std::max(worst, std::abs(a.values[k] - b.values[k]));
        }
    }
    CriterionResult r;
    r.number = 4;
    r.name = "gauge transformation leaves all twelve signals unchanged";
    r.passed = worst <= 1e-12;
    r.detail = "max |signal difference| over 100 random sets = " + num(worst) + " (tol 1e-12)";
    return r;
}

// The consistency residual is zero at first order by construction; the check
// pins the quadratic bound 8 eps^2 on exact signals for error magnitudes up
// to eps = 0.1.  The second-order term is actually
//
//     r = -4 eps_z (phi + 2 phi_p) - 4 v_z (chi + 2 chi_p) + O(eps^3),
//
// (verified by central differences, and independently by the integrated
// pulses of the detuning check), so 8 is the sharp constant for any single
// interacting pair, with eps_z / phi_p the extremal one; over full parameter
// sets the worst corner of the form reaches 24 eps^2.  A full-set draw
// therefore lands above the pinned bound at any scale, and a simulator that
// satisfied it everywhere would have to be missing cross terms.  The check
// is kept at the pinned constant and both measured ratios are reported.
inline CriterionResult criterion_residual_bound(uint64_t seed) {
    RandomStream rng(seed, 5);
    const std::array<double, 4> scales = {0.1, 0.05, 0.025, 0.0125};

    const auto residual = [](const PulseErrorParams& p) {
        const auto& s = simulate_all(p).values;
        return (s[8] - s[9]) + (s[10] - s[11]);
    };

    double worst_full = 0.0;
    for (double eps : scales) {
        for (int trial = 0; trial < 100; ++trial) {
            const double res = residual(random_params(rng, eps));
            worst_full = std::max(worst_full, std::abs(res) / (8.0 * eps * eps));
        }
    }

    double worst_pair = 0.0;
    for (double eps : scales) {
        for (int j = 0; j < PulseErrorParams::kCount; ++j) {
            for (int k = j + 1; k < PulseErrorParams::kCount; ++k) {
                for (int sign = -1; sign <= 1; sign += 2) {
                    std::array<double, PulseErrorParams::kCount> a{};
                    a[j] = eps;
                    a[k] = sign * eps;
                    const double res = residual(PulseErrorParams::from_array(a));
                    worst_pair = std::max(worst_pair, std::abs(res) / (8.0 * eps * eps));
                }
            }
        }
    }

    CriterionResult r;
    r.number = 5;
    r.name = "consistency residual stays within its quadratic bound";
    r.passed = worst_full <= 1.0 && worst_pair <= 1.0;
    r.detail = "max |residual| / (8 eps^2) = " + num(worst_full) +
               " over full random sets, " + num(worst_pair) +
               " over single pairs (scales 0.1 .. 0.0125); the quadratic form "
               "-4 eps_z (phi + 2 phi_p) - 4 v_z (chi + 2 chi_p) is sharp at 8 eps^2 for the "
               "extremal pair and reaches 24 eps^2 in the worst full-set corner";
    return r;
}

// A physical rotation of the half_pi_y axis by phase offsets up to 30
// degrees.  The estimator reads the in-plane component sin(phase) back
// through vp_x; everything else must stay put.
inline CriterionResult criterion_phase_injection() {
    PhaseSweepConfig cfg;  // zero baseline, -30 .. 30 degrees, 13 points, exact
    const std::vector<SweepPoint> points = run_phase_sweep(cfg);
    const auto baseline = points[points.size() / 2].report.params.to_array();

    double worst_inner = 0.0;
    double worst_outer = 0.0;
    double worst_drift = 0.0;
    constexpr int kVpxIndex = 10;
    for (const SweepPoint& pt : points) {
        const double injected = std::sin(pt.x * M_PI / 180.0);
        const auto est = pt.report.params.to_array();
        const double err = std::abs(est[kVpxIndex] - injected);
        if (std::abs(pt.x) <= 15.0 + 1e-9) {
            worst_inner = std::max(worst_inner, err);
        } else {
            worst_outer = std::max(worst_outer, err);
        }
        for (int k = 0; k < PulseErrorParams::kCount; ++k) {
            if (k != kVpxIndex) {
                worst_drift = std::max(worst_drift, std::abs(est[k] - baseline[k]));
            }
        }
    }
    CriterionResult r;
    r.number = 6;
    r.name = "injected phase tilt is recovered as vp_x = sin(phase)";
    r.passed = worst_inner <= 0.01 && worst_outer <= 0.05 && worst_drift < 0.02;
    r.detail = "max |vp_x - sin(phase)| = " + num(worst_inner) + " (|phase| <= 15 deg, tol 0.01), " +
               num(worst_outer) + " (to 30 deg, tol 0.05); max drift of other parameters = " +
               num(worst_drift) + " (tol 0.02)";
    return r;
}

// Twenty trapezoidal pulse sets integrated off resonance.  Decomposing the
// integrated unitaries directly must agree with running the full bootstrap
// on their signals; both are exact up to the estimator's quadratic model
// error, so the gap is bounded by 2 (max |param|)^2 per configuration.
inline CriterionResult criterion_detuned_pulses() {
    const std::array<double, 2> edges_ns = {1.0, 2.0};
    const std::array<double, 10> detunings_mhz = {-14.0, -11.0, -8.0, -5.0, -2.0,
                                                  2.0,   5.0,   8.0,  11.0, 14.0};
    double worst_ratio = 0.0;
    int config_count = 0;
    bool all_within = true;
    for (double edge_ns : edges_ns) {
        for (double mhz : detunings_mhz) {
            const PulseSet set = integrate_pulse_set(2 * M_PI * 125e6, 2 * M_PI * 1e6 * mhz,
                                                     edge_ns * 1e-9, 10e-12);
            const PulseErrorParams direct = gauge_fix(extract_all_params(set));
            const PulseErrorParams boot = estimate(simulate_all(set)).params;
            const auto d = direct.to_array();
            const auto b = boot.to_array();
            double dev = 0.0;
            for (int k = 0; k < PulseErrorParams::kCount; ++k) {
                dev = std::max(dev, std::abs(b[k] - d[k]));
            }
            const double tol = 2.0 * direct.max_abs() * direct.max_abs();
            worst_ratio = std::max(worst_ratio, dev / tol);
            all_within = all_within && dev <= tol;
            ++config_count;
        }
    }
    CriterionResult r;
    r.number = 7;
    r.name = "integrated detuned pulses: direct extraction matches bootstrap";
    r.passed = all_within && config_count == 20;
    r.detail = "max deviation / (2 max|param|^2) = " + num(worst_ratio) + " over " +
               std::to_string(config_count) + " configurations (edges 1-2 ns, detunings 2-14 MHz)";
    return r;
}

// Tomography round trip on exact data: predicted signals fed straight back
// into the reconstruction must reproduce the process matrix to solver
// precision, with ideal pulses and with error-laden ones.
inline CriterionResult criterion_qpt_round_trip(uint64_t seed) {
    RandomStream rng(seed, 8);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const double z = 2.0 * rng.next_unit() - 1.0;
        const double az = 2.0 * M_PI * rng.next_unit();
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const Eigen::Vector3d axis(rho * std::cos(az), rho * std::sin(az), z);
        const double angle = M_PI * (2.0 * rng.next_unit() - 1.0);
        const ChiMatrix chi = chi_of_unitary(rotation_unitary(axis.normalized(), angle));

        const PrepReadoutModel models[2] = {
            PrepReadoutModel::ideal(),
            PrepReadoutModel::from_pulse_set(PulseSet::from_params(random_params(rng, 0.1))),
        };
        for (const PrepReadoutModel& model : models) {
            const QptReconstruction rec = qpt_reconstruct(predict_signals(chi, model), model, true);
            worst = std::max(worst, (rec.chi - chi).norm());
        }
    }
    CriterionResult r;
    r.number = 8;
    r.name = "process tomography round-trips exactly on exact data";
    r.passed = worst <= 1e-9;
    r.detail = "max Frobenius error over 50 unitary processes x 2 models = " + num(worst) +
               " (tol 1e-9)";
    return r;
}

// The headline experiment: tomography of the pi_y pulse under a swept phase
// tilt.  The uncorrected analysis must show a clear fidelity deficit at the
// 30 degree endpoint, and rebuilding the prep/readout model from a bootstrap
// run must recover the fidelity everywhere and shrink the matrix distance at
// every nonzero offset.
inline CriterionResult criterion_qpt_correction() {
    const auto t0 = std::chrono::steady_clock::now();
    QptExperimentConfig cfg;  // pi_y process, -30 .. 30 degrees, 13 points, exact
    const QptExperimentResult res = run_qpt_experiment(cfg);

    double min_corrected = 1.0;
    bool hs_improved = true;
    for (const QptSweepPoint& pt : res.points) {
        min_corrected = std::min(min_corrected, pt.fidelity_corrected);
        if (pt.phase_deg != 0.0 && pt.hs_corrected >= pt.hs_raw) {
            hs_improved = false;
        }
    }
    const double deficit = 1.0 - res.points.back().fidelity_raw;
    const bool deficit_ok = deficit >= 0.03 && deficit <= 0.12;
    const bool in_budget = seconds_since(t0) < 30.0;

    CriterionResult r;
    r.number = 9;
    r.name = "bootstrap-corrected tomography recovers the process fidelity";
    r.passed = min_corrected >= 0.99 && deficit_ok && hs_improved && in_budget;
    r.detail = "min corrected fidelity = " + num(min_corrected) +
               " (tol 0.99); raw deficit at 30 deg = " + num(deficit) +
               " (band 0.03 .. 0.12); corrected matrix distance smaller at every nonzero offset: " +
               yes_no(hs_improved) + "; within 30 s: " + yes_no(in_budget);
    return r;
}

// Monte Carlo check of the covariance propagation: with zero-error pulses
// every signal sits at 0, so each sampled signal carries a binomial error of
// exactly 2 sqrt(0.25 / shots) and every parameter's predicted spread is
// that error times the norm of its estimator row.  The gauge pins epsp_y, so
// its spread must be zero on both sides.
inline CriterionResult criterion_covariance(uint64_t seed) {
    constexpr int kRepeats = 100;
    const ShotConfig cfg{10000, seed};
    const SignalVector exact = simulate_all(PulseErrorParams{});

    std::array<std::array<double, PulseErrorParams::kCount>, kRepeats> draws{};
    for (int rep = 0; rep < kRepeats; ++rep) {
        const SignalVector sv =
            sample_signals(exact, cfg, static_cast<uint64_t>(rep) * kSequenceCount);
        draws[rep] = estimate(sv).params.to_array();
    }

    const double sigma = 2.0 * std::sqrt(0.25 / static_cast<double>(cfg.shots_per_sequence));
    double ratio_lo = 1e300;
    double ratio_hi = 0.0;
    bool pinned_ok = true;
    for (int k = 0; k < PulseErrorParams::kCount; ++k) {
        double mean = 0.0;
        for (int rep = 0; rep < kRepeats; ++rep) {
            mean += draws[rep][k];
        }
        mean /= kRepeats;
        double var = 0.0;
        for (int rep = 0; rep < kRepeats; ++rep) {
            const double d = draws[rep][k] - mean;
            var += d * d;
        }
        const double empirical = std::sqrt(var / (kRepeats - 1));
        const double predicted = sigma * estimator_matrix().row(k).norm();
        if (predicted < 1e-15) {
            pinned_ok = pinned_ok && empirical < 1e-12;
            continue;
        }
        const double ratio = empirical / predicted;
        ratio_lo = std::min(ratio_lo, ratio);
        ratio_hi = std::max(ratio_hi, ratio);
    }
    CriterionResult r;
    r.number = 10;
    r.name = "sampled-estimate scatter matches the propagated covariance";
    r.passed = ratio_lo >= 0.5 && ratio_hi <= 2.0 && pinned_ok;
    r.detail = "empirical / predicted std in [" + num(ratio_lo) + ", " + num(ratio_hi) +
               "] over the 11 free parameters (band 0.5 .. 2); pinned parameter at zero: " +
               yes_no(pinned_ok);
    return r;
}

inline std::vector<CriterionResult> run_criteria(uint64_t seed) {
    std::vector<CriterionResult> out;
    out.push_back(criterion_zero_signals());
    out.push_back(criterion_design_matrix());
    out.push_back(criterion_estimator_convergence(seed));
    out.push_back(criterion_gauge_invariance(seed));
    out.push_back(criterion_residual_bound(seed));
    out.push_back(criterion_phase_injection());
    out.push_back(criterion_detuned_pulses());
    out.push_back(criterion_qpt_round_trip(seed));
    out.push_back(criterion_qpt_correction());
    out.push_back(criterion_covariance(seed));
    return out;
}

inline std::string render_criteria(const std::vector<CriterionResult>& criteria) {
    std::string out;
    for (const CriterionResult& c : criteria) {
        char head[16];
        std::snprintf(head, sizeof(head), "C%-3d", c.number);
        out += head;
        out += c.passed ? "PASS  " : "FAIL  ";
        out += c.name;
        if (!c.detail.empty()) {
            out += ": " + c.detail;
        }
        out += "\n";
        if (!c.extra.empty()) {
            out += c.extra;
        }
    }
    return out;
}

}  // namespace verify_detail

struct VerificationReport {
    uint64_t seed = 0;
    std::vector<CriterionResult> criteria;

    bool all_passed() const {
        for (const CriterionResult& c : criteria) {
            if (!c.passed) {
                return false;
            }
        }
        return !criteria.empty();
    }

    std::string text() const {
        std::string out = "btomo verification, seed " + std::to_string(seed) + "\n";
        out += verify_detail::render_criteria(criteria);
        int passed = 0;
        for (const CriterionResult& c : criteria) {
            passed += c.passed ? 1 : 0;
        }
        out += "result: " + std::string(all_passed() ? "PASS" : "FAIL") + " (" +
               std::to_string(passed) + "/" + std::to_string(criteria.size()) + " criteria)\n";
        return out;
    }
};

// Runs the ten numeric criteria twice and compares the rendered text byte
// for byte; the comparison itself is the eleventh criterion.  The returned
// report holds the first pass plus that determinism check.
inline VerificationReport run_verification(uint64_t seed = 0) {
    VerificationReport report;
    report.seed = seed;
    report.criteria = verify_detail::run_criteria(seed);
    const std::vector<CriterionResult> second = verify_detail::run_criteria(seed);
    const bool identical = verify_detail::render_criteria(report.criteria) ==
                           verify_detail::render_criteria(second);

    CriterionResult c11;
    c11.number = 11;
    c11.name = "verification is deterministic for a fixed seed";
    c11.passed = identical;
    c11.detail = identical ? "two complete passes rendered byte-identical reports"
                           : "the two passes rendered different reports";
    report.criteria.push_back(c11);
    return report;
}

}  // namespace btomo

#endif  // BTOMO_VERIFY_HPP
