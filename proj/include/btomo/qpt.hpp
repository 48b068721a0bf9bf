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

#ifndef BTOMO_QPT_HPP
#define BTOMO_QPT_HPP

#include "btomo/measurement.hpp"
#include "btomo/pulse_model.hpp"

// Single-qubit process tomography in the chi-matrix picture, including the
// prepare/readout pulses as explicit, possibly imperfect, unitaries.
//
// A process E acts as E(rho) = sum_mn chi_mn sigma_m rho sigma_n over the
// basis {I, sx, sy, sz}.  Twelve settings are measured: four preparations
// (nothing, pi_x, half_pi_x, half_pi_y applied to spin-up) crossed with three
// readouts (<sigma_z> directly, or after half_pi_x / half_pi_y).  The chi
// matrix of the process is then a linear least-squares fit, optionally
// constrained to trace preservation.  Reconstructing with the imperfect
// prepare/readout model recovers the process that the same data misrepresents
// under the ideal model; that comparison is the point of the exercise.

namespace btomo {

using ChiMatrix = Eigen::Matrix4cd;  // Hermitian in the {I, sx, sy, sz} basis

constexpr int kQptPrepCount = 4;
constexpr int kQptReadoutCount = 3;
constexpr int kQptSettingCount = kQptPrepCount * kQptReadoutCount;

inline int qpt_setting_index(int prep, int readout) {
    return kQptReadoutCount * prep + readout;
}

inline ChiMatrix identity_chi() {
    ChiMatrix c = ChiMatrix::Zero();
    c(0, 0) = 1.0;
    return c;
}

// chi of a unitary process: chi = a a' with a_m = Tr(sigma_m U) / 2.
inline ChiMatrix chi_of_unitary(const Unitary2& u) {
    if (!is_unitary(u, 1e-8)) {
        throw std::invalid_argument("chi_of_unitary: input is not unitary");
    }
    Eigen::Vector4cd a;
    for (int m = 0; m < 4; ++m) {
        a(m) = 0.5 * (pauli(m) * u).trace();
    }
    return a * a.adjoint();
}

inline void validate_chi(const ChiMatrix& chi) {
    if (!chi.allFinite() || (chi - chi.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
        throw std::invalid_argument("ChiMatrix must be finite and Hermitian");
    }
}

// E(rho) = sum_mn chi_mn sigma_m rho sigma_n.
inline Complex2x2 apply_chi(const ChiMatrix& chi, const Complex2x2& rho) {
    Complex2x2 out = Complex2x2::Zero();
    for (int m = 0; m < 4; ++m) {
        for (int n = 0; n < 4; ++n) {
            if (chi(m, n) == complexd(0.0, 0.0)) continue;
            out += chi(m, n) * (pauli(m) * rho * pauli(n));
        }
    }
    return out;
}

// The pulses actually used for state preparation and readout rotation, in
// setting order.  prep[0] and readout[0] are the identity (no pulse).
struct PrepReadoutModel {
    std::array<Unitary2, kQptPrepCount> prep;
    std::array<Unitary2, kQptReadoutCount> readout;

    static PrepReadoutModel ideal() { return from_pulse_set(PulseSet::ideal()); }

    static PrepReadoutModel from_pulse_set(const PulseSet& set) {
        PrepReadoutModel m;
        m.prep[0] = Complex2x2::Identity();
        m.prep[1] = set[PulseId::PiX];
        m.prep[2] = set[PulseId::HalfPiX];
        m.prep[3] = set[PulseId::HalfPiY];
        m.readout[0] = Complex2x2::Identity();
        m.readout[1] = set[PulseId::HalfPiX];
        m.readout[2] = set[PulseId::HalfPiY];
        return m;
    }
};

struct QptData {
    std::array<double, kQptSettingCount> values{};
    std::optional<std::array<double, kQptSettingCount>> stderrs;

    void validate() const {
        for (double v : values) {
            if (!std::isfinite(v) || std::abs(v) > 1.0 + 1e-9) {
                throw std::invalid_argument("QptData: signals must be finite and within [-1, 1]");
            }
        }
        if (stderrs) {
            for (double s : *stderrs) {
                if (!std::isfinite(s) || s <= 0.0) {
                    throw std::invalid_argument("QptData: stderrs must be finite and positive");
                }
            }
        }
    }
};

// <sigma_z> for every setting, given the process and the actual pulses used
// to prepare and read out.
inline QptData predict_signals(const ChiMatrix& chi, const PrepReadoutModel& model) {
    validate_chi(chi);
    QptData out;
    const Complex2x2 rho_up = 0.5 * (pauli(0) + pauli(3));
    for (int i = 0; i < kQptPrepCount; ++i) {
        const Complex2x2 rho = model.prep[i] * rho_up * model.prep[i].adjoint();
        const Complex2x2 mapped = apply_chi(chi, rho);
        for (int r = 0; r < kQptReadoutCount; ++r) {
            const Complex2x2& ur = model.readout[r];
            out.values[qpt_setting_index(i, r)] =
                std::real((pauli(3) * ur * mapped * ur.adjoint()).trace());
        }
    }
    return out;
}

struct QptReconstruction {
    ChiMatrix chi = ChiMatrix::Zero();
    // L2 misfit over the twelve settings (unweighted, trace-preservation rows
    // excluded), for judging whether the model explains the data.
    double fit_residual = 0.0;
    int rank = 0;
    // True when the rows leave chi directions undetermined (always the case
    // without the trace-preservation constraint: 12 rows, 16 unknowns).
    bool rank_deficient = false;
    // Smallest eigenvalue of the reconstructed chi.  Negative values flag an
    // unphysical fit; positivity is reported, never enforced.
    double min_eigenvalue = 0.0;
    bool tp_enforced = false;
};

namespace detail {

// Real parametrization of a Hermitian chi: 4 diagonal entries, then
// (Re, Im) of the strict upper triangle in row-major pair order.
inline const std::array<std::pair<int, int>, 6>& chi_pair_order() {
    static const std::array<std::pair<int, int>, 6> pairs = {{
        {0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3},
    }};
    return pairs;
}

inline ChiMatrix chi_from_packed(const Eigen::Matrix<double, 16, 1>& x) {
    ChiMatrix chi = ChiMatrix::Zero();
    for (int m = 0; m < 4; ++m) chi(m, m) = x(m);
    for (size_t k = 0; k < chi_pair_order().size(); ++k) {
        const auto [m, n] = chi_pair_order()[k];
        const complexd v(x(4 + 2 * static_cast<int>(k)), x(5 + 2 * static_cast<int>(k)));
        chi(m, n) = v;
        chi(n, m) = std::conj(v);
    }
    return chi;
}

// Packs the linear functional chi -> sum_mn chi_mn T_mn into a row acting on
// the real parametrization.  T must be Hermitian in (m, n) for the functional
// to be real; both the measurement and the trace rows are.
template <typename Row>
inline void pack_row(Row&& row, const Eigen::Matrix4cd& t) {
    for (int m = 0; m < 4; ++m) row(m) = std::real(t(m, m));
    for (size_t k = 0; k < chi_pair_order().size(); ++k) {
        const auto [m, n] = chi_pair_order()[k];
        row(4 + 2 * static_cast<int>(k)) = 2.0 * std::real(t(m, n));
        row(5 + 2 * static_cast<int>(k)) = -2.0 * std::imag(t(m, n));
    }
}

}  // namespace detail

// Least-squares chi from the twelve settings.  With enforce_tp the four trace
// conditions sum_mn chi_mn sigma_n sigma_m = I join the system as exact rows
// (weighted like the strongest data row).  The minimum-norm solution is
// reported when directions stay undetermined.
inline QptReconstruction qpt_reconstruct(const QptData& data,
                                         const PrepReadoutModel& model,
                                         bool enforce_tp = true) {
    data.validate();
    const int rows = kQptSettingCount + (enforce_tp ? 4 : 0);
    Eigen::MatrixXd a(rows, 16);
    Eigen::VectorXd b(rows);

    const Complex2x2 rho_up = 0.5 * (pauli(0) + pauli(3));
    for (int i = 0; i < kQptPrepCount; ++i) {
        const Complex2x2 rho = model.prep[i] * rho_up * model.prep[i].adjoint();
        for (int r = 0; r < kQptReadoutCount; ++r) {
            const Complex2x2 obs = model.readout[r].adjoint() * pauli(3) * model.readout[r];
            Eigen::Matrix4cd t;
            for (int m = 0; m < 4; ++m) {
                for (int n = 0; n < 4; ++n) {
                    t(m, n) = (obs * pauli(m) * rho * pauli(n)).trace();
                }
            }
            const int row = qpt_setting_index(i, r);
            detail::pack_row(a.row(row), t);
            b(row) = data.values[row];
        }
    }

    double w_data_max = 1.0;
    if (data.stderrs) {
        for (int k = 0; k < kQptSettingCount; ++k) {
            const double w = 1.0 / (*data.stderrs)[k];
            w_data_max = std::max(w_data_max, w);
            a.row(k) *= w;
            b(k) *= w;
        }
    }

    if (enforce_tp) {
        for (int g = 0; g < 4; ++g) {
            Eigen::Matrix4cd t;
            for (int m = 0; m < 4; ++m) {
                for (int n = 0; n < 4; ++n) {
                    t(m, n) = 0.5 * (pauli(g) * pauli(n) * pauli(m)).trace();
                }
            }
            const int row = kQptSettingCount + g;
            detail::pack_row(a.row(row), t);
            b(row) = (g == 0) ? 1.0 : 0.0;
            a.row(row) *= w_data_max;
            b(row) *= w_data_max;
        }
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    cod.setThreshold(1e-10);
    const Eigen::Matrix<double, 16, 1> x = cod.solve(b);

    QptReconstruction out;
    out.chi = detail::chi_from_packed(x);
    out.rank = static_cast<int>(cod.rank());
    out.rank_deficient = out.rank < 16;
    out.tp_enforced = enforce_tp;
    const QptData refit = predict_signals(out.chi, model);
    double acc = 0.0;
    for (int k = 0; k < kQptSettingCount; ++k) {
        const double d = refit.values[k] - data.values[k];
        acc += d * d;
    }
    out.fit_residual = std::sqrt(acc);
    Eigen::SelfAdjointEigenSolver<ChiMatrix> eig(out.chi);
    out.min_eigenvalue = eig.eigenvalues()(0);
    return out;
}

// Re Tr(a b): overlap of two chi matrices; equals the process fidelity for
// normalized inputs.
inline double process_fidelity(const ChiMatrix& a, const ChiMatrix& b) {
    validate_chi(a);
    validate_chi(b);
    return std::real((a * b).trace());
}

// Frobenius distance between two chi matrices.
inline double hs_distance(const ChiMatrix& a, const ChiMatrix& b) {
    validate_chi(a);
    validate_chi(b);
    return (a - b).norm();
}

}  // namespace btomo

#endif
