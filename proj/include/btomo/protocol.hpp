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

#ifndef BTOMO_PROTOCOL_HPP
#define BTOMO_PROTOCOL_HPP

#include <optional>
#include <string_view>

#include "btomo/pulse_model.hpp"

// The twelve-sequence bootstrap protocol.
//
// Each sequence starts from spin-up, applies one to three of the four
// calibration pulses, and reads out <sigma_z>.  The sequences are grouped in
// three blocks: block 1 pins the pi/2 angle errors, block 2 adds the pi pulse
// angle and z-axis errors using the already-characterized pi/2 pulses, and
// block 3 resolves the in-plane axis errors.  To first order in the twelve
// error parameters the signals are linear with integer-valued coefficients;
// the inversion below is exact on that linear model.
//
// One direction is invisible: rotating every pulse axis by a common angle
// about z changes no signal, so the sum eps_y + epsp_y (and equally
// -v_x - vp_x) cannot be measured.  The estimator returns the gauge with
// epsp_y = 0; see gauge_fix.

namespace btomo {

enum class SequenceId : int {
    B1S1 = 0,
    B1S2,
    B2S1,
    B2S2,
    B2S3,
    B2S4,
    B3S1,
    B3S2,
    B3S3,
    B3S4,
    B3S5,
    B3S6,
};

constexpr int kSequenceCount = 12;

inline const char* sequence_name(SequenceId id) {
    static const std::array<const char*, kSequenceCount> names = {
        "B1S1", "B1S2", "B2S1", "B2S2", "B2S3", "B2S4",
        "B3S1", "B3S2", "B3S3", "B3S4", "B3S5", "B3S6",
    };
    return names.at(static_cast<size_t>(id));
}

inline std::optional<SequenceId> parse_sequence_name(std::string_view s) {
    for (int k = 0; k < kSequenceCount; ++k) {
        if (s == sequence_name(static_cast<SequenceId>(k))) {
            return static_cast<SequenceId>(k);
        }
    }
    return std::nullopt;
}

inline int sequence_block(SequenceId id) {
    const int k = static_cast<int>(id);
    return k < 2 ? 1 : (k < 6 ? 2 : 3);
}

// Pulses of one sequence in application order (first applied first).
inline const std::vector<PulseId>& sequence_pulses(SequenceId id) {
    static const std::array<std::vector<PulseId>, kSequenceCount> table = {{
        {PulseId::HalfPiX},
        {PulseId::HalfPiY},
        {PulseId::PiX, PulseId::HalfPiX},
        {PulseId::PiY, PulseId::HalfPiY},
        {PulseId::HalfPiX, PulseId::PiY},
        {PulseId::HalfPiY, PulseId::PiX},
        {PulseId::HalfPiX, PulseId::HalfPiY},
        {PulseId::HalfPiY, PulseId::HalfPiX},
        {PulseId::HalfPiY, PulseId::PiX, PulseId::HalfPiX},
        {PulseId::HalfPiX, PulseId::PiX, PulseId::HalfPiY},
        {PulseId::HalfPiY, PulseId::PiY, PulseId::HalfPiX},
        {PulseId::HalfPiX, PulseId::PiY, PulseId::HalfPiY},
    }};
    return table.at(static_cast<size_t>(id));
}

// <sigma_z> after running one sequence from spin-up with the given pulses.
inline double simulate_signal(SequenceId id, const PulseSet& set) {
    std::vector<Unitary2> ops;
    for (PulseId p : sequence_pulses(id)) ops.push_back(set[p]);
    return sigma_z_expectation(apply_to_up(compose(ops)));
}

inline double simulate_signal(SequenceId id, const PulseErrorParams& p) {
    return simulate_signal(id, PulseSet::from_params(p));
}

struct SignalVector {
    std::array<double, kSequenceCount> values{};
    std::optional<std::array<double, kSequenceCount>> stderrs;

    void validate() const {
        for (double v : values) {
            if (!std::isfinite(v) || std::abs(v) > 1.0 + 1e-9) {
                throw std::invalid_argument("SignalVector: signals must be finite and within [-1, 1]");
            }
        }
        if (stderrs) {
            for (double s : *stderrs) {
                if (!std::isfinite(s) || s <= 0.0) {
                    throw std::invalid_argument("SignalVector: stderrs must be finite and positive");
                }
            }
        }
    }
};

inline SignalVector simulate_all(const PulseSet& set) {
    SignalVector sv;
    for (int k = 0; k < kSequenceCount; ++k) {
        sv.values[k] = simulate_signal(static_cast<SequenceId>(k), set);
    }
    return sv;
}

inline SignalVector simulate_all(const PulseErrorParams& p) {
    return simulate_all(PulseSet::from_params(p));
}

using Matrix12 = Eigen::Matrix<double, kSequenceCount, PulseErrorParams::kCount>;

// First-order signal coefficients: signal ~ design_matrix() * params.
// Rank 11; the null direction is gauge_direction().
inline const Matrix12& design_matrix() {
    static const Matrix12 m = [] {
        Matrix12 d = Matrix12::Zero();
        enum { phi, eps_y, eps_z, phi_p, epsp_y, epsp_z, chi, v_x, v_z, chi_p, vp_x, vp_z };
        using S = SequenceId;
        const auto row = [&d](S s) -> Eigen::Block<Matrix12, 1, 12> {
            return d.block<1, 12>(static_cast<int>(s), 0);
        };
        row(S::B1S1)(phi_p) = -2.0;
        row(S::B1S2)(chi_p) = -2.0;
        row(S::B2S1)(phi) = 2.0;
        row(S::B2S1)(phi_p) = 2.0;
        row(S::B2S2)(chi) = 2.0;
        row(S::B2S2)(chi_p) = 2.0;
        row(S::B2S3)(v_z) = -2.0;
        row(S::B2S3)(phi_p) = 2.0;
        row(S::B2S4)(eps_z) = 2.0;
        row(S::B2S4)(chi_p) = 2.0;
        row(S::B3S1)(epsp_y) = -1.0;
        row(S::B3S1)(epsp_z) = -1.0;
        row(S::B3S1)(vp_x) = -1.0;
        row(S::B3S1)(vp_z) = -1.0;
        row(S::B3S2)(epsp_y) = -1.0;
        row(S::B3S2)(epsp_z) = 1.0;
        row(S::B3S2)(vp_x) = -1.0;
        row(S::B3S2)(vp_z) = 1.0;
        row(S::B3S3)(eps_y) = 2.0;
        row(S::B3S3)(epsp_y) = -1.0;
        row(S::B3S3)(epsp_z) = 1.0;
        row(S::B3S3)(vp_x) = 1.0;
        row(S::B3S3)(vp_z) = -1.0;
        row(S::B3S4)(eps_y) = 2.0;
        row(S::B3S4)(epsp_y) = -1.0;
        row(S::B3S4)(epsp_z) = -1.0;
        row(S::B3S4)(vp_x) = 1.0;
        row(S::B3S4)(vp_z) = 1.0;
        row(S::B3S5)(v_x) = 2.0;
        row(S::B3S5)(epsp_y) = 1.0;
        row(S::B3S5)(epsp_z) = -1.0;
        row(S::B3S5)(vp_x) = -1.0;
        row(S::B3S5)(vp_z) = 1.0;
        row(S::B3S6)(v_x) = 2.0;
        row(S::B3S6)(epsp_y) = 1.0;
        row(S::B3S6)(epsp_z) = 1.0;
        row(S::B3S6)(vp_x) = -1.0;
        row(S::B3S6)(vp_z) = -1.0;
        return d;
    }();
    return m;
}

// First-order prediction of one signal.
inline double linearized_signal(SequenceId id, const PulseErrorParams& p) {
    p.validate();
    const auto a = p.to_array();
    double acc = 0.0;
    for (int k = 0; k < PulseErrorParams::kCount; ++k) {
        acc += design_matrix()(static_cast<int>(id), k) * a[k];
    }
    return acc;
}

// The single direction in parameter space that no signal sees: a common
// rotation of all four axes about z.
inline std::array<double, PulseErrorParams::kCount> gauge_direction() {
    //                 phi eps_y eps_z phi_p epsp_y epsp_z chi v_x  v_z chi_p vp_x vp_z
    return {0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0, -1.0, 0.0};
}

// Linear inversion of the protocol: params = estimator_matrix() * signals in
// the epsp_y = 0 gauge.  Each row is the closed-form combination used by
// estimate(); the matrix form exists for covariance propagation and for
// cross-checks against the generic least-squares path.
inline const Matrix12& estimator_matrix() {
    static const Matrix12 m = [] {
        Matrix12 p = Matrix12::Zero();  // rows: params, cols: signals
        enum { phi, eps_y, eps_z, phi_p, epsp_y, epsp_z, chi, v_x, v_z, chi_p, vp_x, vp_z };
        enum { S1, S2, S3, S4, S5, S6, S7, S8, S9, S10, S11, S12 };
        p(phi, S1) = 0.5;
        p(phi, S3) = 0.5;
        p(eps_y, S7) = 0.25;
        p(eps_y, S8) = 0.25;
        p(eps_y, S9) = 0.25;
        p(eps_y, S10) = 0.25;
        p(eps_z, S2) = 0.5;
        p(eps_z, S6) = 0.5;
        p(phi_p, S1) = -0.5;
        // epsp_y row stays zero: gauge choice.
        p(epsp_z, S7) = -0.25;
        p(epsp_z, S8) = 0.25;
        p(epsp_z, S9) = 0.25;
        p(epsp_z, S10) = -0.25;
        p(chi, S2) = 0.5;
        p(chi, S4) = 0.5;
        p(v_x, S7) = -0.25;
        p(v_x, S8) = -0.25;
        p(v_x, S11) = 0.25;
        p(v_x, S12) = 0.25;
        p(v_z, S1) = -0.5;
        p(v_z, S5) = -0.5;
        p(chi_p, S2) = -0.5;
        p(vp_x, S7) = -0.5;
        p(vp_x, S8) = -0.5;
        p(vp_z, S7) = -0.25;
        p(vp_z, S8) = 0.25;
        p(vp_z, S9) = -0.25;
        p(vp_z, S10) = 0.25;
        return p;
    }();
    return m;
}

struct EstimateOptions {
    // Refine the linear estimate by Newton steps against the exact forward
    // model.  Off by default: the plain closed form is the protocol.
    int refit_iterations = 0;
};

struct EstimateReport {
    PulseErrorParams params;
    // Propagated from per-signal stderrs when present; zero otherwise.  The
    // epsp_y row and column are zero by the gauge choice.
    Eigen::Matrix<double, 12, 12> covariance = Eigen::Matrix<double, 12, 12>::Zero();
    std::array<double, 12> stderrs{};
    bool has_uncertainty = false;
    // (S9 - S10) + (S11 - S12); identically zero on first-order-consistent
    // data, so a large value flags input the model cannot explain.
    double consistency_residual = 0.0;
    bool model_inconsistent = false;
    bool linear_regime_exceeded = false;
};

namespace detail {
inline PulseSet pulse_set_unchecked(const PulseErrorParams& p) {
    PulseSet s;
    for (int k = 0; k < kPulseCount; ++k) {
        s.u[k] = imperfect_unitary_unchecked(p, static_cast<PulseId>(k));
    }
    return s;
}
}  // namespace detail

// Closed-form inversion of the twelve signals, block by block, in the
// epsp_y = 0 gauge.  Estimates against data from out-of-range pulses are
// returned as-is; callers decide what an out-of-range estimate means.
inline EstimateReport estimate(const SignalVector& sv, const EstimateOptions& opt = {}) {
    sv.validate();
    const auto& s = sv.values;
    const double s1 = s[0], s2 = s[1], s3 = s[2], s4 = s[3], s5 = s[4], s6 = s[5];
    const double s7 = s[6], s8 = s[7], s9 = s[8], s10 = s[9], s11 = s[10], s12 = s[11];

    EstimateReport out;
    PulseErrorParams& p = out.params;
    // Block 1: pi/2 angle errors.
    p.phi_p = -0.5 * s1;
    p.chi_p = -0.5 * s2;
    // Block 2: pi angle errors and z tilts, using block 1.
    p.phi = 0.5 * s3 - p.phi_p;
    p.chi = 0.5 * s4 - p.chi_p;
    p.v_z = p.phi_p - 0.5 * s5;
    p.eps_z = 0.5 * s6 - p.chi_p;
    // Block 3: in-plane tilts, gauge epsp_y = 0.
    p.epsp_y = 0.0;
    p.vp_x = -0.5 * (s7 + s8);
    p.epsp_z = 0.25 * ((s8 - s7) + (s9 - s10));
    p.vp_z = 0.25 * ((s8 - s7) - (s9 - s10));
    p.eps_y = 0.25 * (s7 + s8 + s9 + s10);
    p.v_x = 0.25 * (s11 + s12 - s7 - s8);

    out.consistency_residual = (s9 - s10) + (s11 - s12);
    out.model_inconsistent = std::abs(out.consistency_residual) > 0.1;
    out.linear_regime_exceeded = p.exceeds_linear_regime();

    if (sv.stderrs) {
        out.has_uncertainty = true;
        Eigen::Matrix<double, 12, 12> noise = Eigen::Matrix<double, 12, 12>::Zero();
        for (int k = 0; k < kSequenceCount; ++k) {
            noise(k, k) = (*sv.stderrs)[k] * (*sv.stderrs)[k];
        }
        out.covariance = estimator_matrix() * noise * estimator_matrix().transpose();
        for (int k = 0; k < 12; ++k) {
            out.stderrs[k] = std::sqrt(std::max(0.0, out.covariance(k, k)));
        }
    }

    for (int it = 0; it < opt.refit_iterations; ++it) {
        // Newton step against the exact forward model; the Jacobian at the
        // origin is design_matrix(), whose gauge-fixed inverse is
        // estimator_matrix().
        const SignalVector model = simulate_all(detail::pulse_set_unchecked(out.params));
        Eigen::Matrix<double, 12, 1> delta;
        for (int k = 0; k < kSequenceCount; ++k) {
            delta(k) = sv.values[k] - model.values[k];
        }
        const Eigen::Matrix<double, 12, 1> step = estimator_matrix() * delta;
        auto a = out.params.to_array();
        for (int k = 0; k < 12; ++k) a[k] += step(k);
        out.params = PulseErrorParams::from_array(a);
    }
    return out;
}

// Same inversion, but demands per-signal uncertainties so the covariance in
// the report is meaningful.
inline EstimateReport estimate_with_uncertainty(const SignalVector& sv, const EstimateOptions& opt = {}) {
    if (!sv.stderrs) {
        throw std::invalid_argument("estimate_with_uncertainty: signal stderrs are required");
    }
    return estimate(sv, opt);
}

// Generic least-squares inversion of the first-order model, dropping the
// epsp_y column (the gauge fixes it to zero).  Agrees with estimate() to
// rounding on consistent data; on inconsistent data it spreads the residual
// in the L2 sense instead of following the closed-form reading order.
inline PulseErrorParams estimate_least_squares(const SignalVector& sv, bool weighted = false) {
    sv.validate();
    if (weighted && !sv.stderrs) {
        throw std::invalid_argument("estimate_least_squares: weighting requires stderrs");
    }
    Eigen::Matrix<double, 12, 11> m;
    int col = 0;
    for (int k = 0; k < 12; ++k) {
        if (k == 4) continue;  // epsp_y
        m.col(col++) = design_matrix().col(k);
    }
    Eigen::Matrix<double, 12, 1> rhs;
    for (int k = 0; k < 12; ++k) rhs(k) = sv.values[k];
    if (weighted) {
        for (int k = 0; k < 12; ++k) {
            const double w = 1.0 / (*sv.stderrs)[k];
            m.row(k) *= w;
            rhs(k) *= w;
        }
    }
    const Eigen::Matrix<double, 11, 1> sol =
        m.completeOrthogonalDecomposition().solve(rhs);
    std::array<double, 12> a{};
    col = 0;
    for (int k = 0; k < 12; ++k) {
        a[k] = (k == 4) ? 0.0 : sol(col++);
    }
    return PulseErrorParams::from_array(a);
}

}  // namespace btomo

#endif
