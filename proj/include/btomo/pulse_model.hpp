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

#ifndef BTOMO_PULSE_MODEL_HPP
#define BTOMO_PULSE_MODEL_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>

#include "btomo/qubit_algebra.hpp"

// Model of the four calibration pulses (pi and pi/2 about x and y) and of
// their deviations from nominal.
//
// Each imperfect pulse is still a pure rotation:
//   pi_x      : angle pi   + 2*phi    about normalize(1, eps_y, eps_z)
//   half_pi_x : angle pi/2 + 2*phi'   about normalize(1, eps_y', eps_z')
//   pi_y      : angle pi   + 2*chi    about normalize(v_x, 1, v_z)
//   half_pi_y : angle pi/2 + 2*chi'   about normalize(v_x', 1, v_z')
// Angle errors enter as half-angles (the generator picture), axis errors as
// ratios against the dominant component.  All twelve are dimensionless.

namespace btomo {

enum class PulseId : int { PiX = 0, PiY = 1, HalfPiX = 2, HalfPiY = 3 };

constexpr int kPulseCount = 4;

inline const char* pulse_name(PulseId id) {
    switch (id) {
        case PulseId::PiX: return "pi_x";
        case PulseId::PiY: return "pi_y";
        case PulseId::HalfPiX: return "half_pi_x";
        case PulseId::HalfPiY: return "half_pi_y";
    }
    throw std::invalid_argument("pulse_name: bad id");
}

inline double nominal_angle(PulseId id) {
    return (id == PulseId::PiX || id == PulseId::PiY) ? M_PI : M_PI / 2;
}

inline Eigen::Vector3d nominal_axis(PulseId id) {
    return (id == PulseId::PiX || id == PulseId::HalfPiX) ? Eigen::Vector3d::UnitX()
                                                          : Eigen::Vector3d::UnitY();
}

inline bool is_x_pulse(PulseId id) {
    return id == PulseId::PiX || id == PulseId::HalfPiX;
}

struct PulseErrorParams {
    // pi_x
    double phi = 0.0;
    double eps_y = 0.0;
    double eps_z = 0.0;
    // half_pi_x
    double phi_p = 0.0;
    double epsp_y = 0.0;
    double epsp_z = 0.0;
    // pi_y
    double chi = 0.0;
    double v_x = 0.0;
    double v_z = 0.0;
    // half_pi_y
    double chi_p = 0.0;
    double vp_x = 0.0;
    double vp_z = 0.0;

    static constexpr int kCount = 12;

    // Canonical component order, used by every vector and matrix in the toolkit.
    static const std::array<const char*, kCount>& names() {
        static const std::array<const char*, kCount> n = {
            "phi",  "eps_y", "eps_z", "phi_p", "epsp_y", "epsp_z",
            "chi",  "v_x",   "v_z",   "chi_p", "vp_x",   "vp_z",
        };
        return n;
    }

    std::array<double, kCount> to_array() const {
        return {phi, eps_y, eps_z, phi_p, epsp_y, epsp_z, chi, v_x, v_z, chi_p, vp_x, vp_z};
    }

    static PulseErrorParams from_array(const std::array<double, kCount>& a) {
        PulseErrorParams p;
        p.phi = a[0];
        p.eps_y = a[1];
        p.eps_z = a[2];
        p.phi_p = a[3];
        p.epsp_y = a[4];
        p.epsp_z = a[5];
        p.chi = a[6];
        p.v_x = a[7];
        p.v_z = a[8];
        p.chi_p = a[9];
        p.vp_x = a[10];
        p.vp_z = a[11];
        return p;
    }

    double max_abs() const {
        const auto a = to_array();
        double m = 0.0;
        for (double v : a) m = std::max(m, std::abs(v));
        return m;
    }

    // Hard model range.  The pulse model itself is exact at any size, but the
    // protocol's closed-form inversion assumes small errors; beyond 0.5 the
    // axis ratios stop being meaningful error measures.
    void validate() const {
        const auto a = to_array();
        for (int k = 0; k < kCount; ++k) {
            if (!(std::abs(a[k]) < 0.5)) {
                throw std::invalid_argument(std::string("pulse error parameter out of range: ") + names()[k]);
            }
        }
    }

    // Advisory threshold: first-order estimates degrade noticeably above this.
    bool exceeds_linear_regime() const { return max_abs() > 0.15; }
};

// Unnormalized rotation axis of one imperfect pulse.
inline Eigen::Vector3d raw_axis(const PulseErrorParams& p, PulseId id) {
    switch (id) {
        case PulseId::PiX: return {1.0, p.eps_y, p.eps_z};
        case PulseId::HalfPiX: return {1.0, p.epsp_y, p.epsp_z};
        case PulseId::PiY: return {p.v_x, 1.0, p.v_z};
        case PulseId::HalfPiY: return {p.vp_x, 1.0, p.vp_z};
    }
    throw std::invalid_argument("raw_axis: bad id");
}

// Half-angle error of one imperfect pulse.
inline double angle_error(const PulseErrorParams& p, PulseId id) {
    switch (id) {
        case PulseId::PiX: return p.phi;
        case PulseId::HalfPiX: return p.phi_p;
        case PulseId::PiY: return p.chi;
        case PulseId::HalfPiY: return p.chi_p;
    }
    throw std::invalid_argument("angle_error: bad id");
}

namespace detail {
// No range check; used where parameter vectors come out of an estimator
// rather than in through the public forward-model contract.
inline Unitary2 imperfect_unitary_unchecked(const PulseErrorParams& p, PulseId id) {
    return rotation_unitary(raw_axis(p, id).normalized(), nominal_angle(id) + 2.0 * angle_error(p, id));
}
}  // namespace detail

// The imperfect pulse as an exact rotation.  The axis is normalized exactly,
// not expanded to first order, so the model stays a rotation at any error size.
inline Unitary2 imperfect_unitary(const PulseErrorParams& p, PulseId id) {
    p.validate();
    return detail::imperfect_unitary_unchecked(p, id);
}

// First-order generator K of the imperfect pulse: U ~ U_nominal (I - i K),
// i.e. K generates the residual rotation U_nominal' U in the frame after the
// ideal pulse.  K is traceless Hermitian and exactly linear in the error
// parameters:
//   K = delta (a.sigma) + [sin t0 * perp + (1 - cos t0)(perp x a)].sigma / 2
// with a the nominal axis, t0 the nominal angle, delta the half-angle error
// and perp the off-axis part of the raw axis.
inline Complex2x2 error_generator(const PulseErrorParams& p, PulseId id) {
    p.validate();
    const double t0 = nominal_angle(id);
    const Eigen::Vector3d a = nominal_axis(id);
    const Eigen::Vector3d perp = raw_axis(p, id) - a;
    const Eigen::Vector3d k = angle_error(p, id) * a
                            + 0.5 * (std::sin(t0) * perp + (1.0 - std::cos(t0)) * perp.cross(a));
    return k.x() * pauli(1) + k.y() * pauli(2) + k.z() * pauli(3);
}

struct ExtractedPulseError {
    double angle_error = 0.0;    // half-angle deviation from nominal
    double axis_inplane = 0.0;   // eps_y / v_x flavor, depending on the pulse
    double axis_z = 0.0;         // eps_z / v_z flavor
};

// Inverse of imperfect_unitary for one pulse: recover (angle error, axis
// ratios) from a measured or simulated unitary.  The input must actually be
// near the nominal pulse; anything further than 0.3 rad of rotation away is
// rejected, since the branch and ratio conventions stop making sense there.
inline ExtractedPulseError extract_error_params(const Unitary2& u, PulseId id) {
    if (!is_unitary(u, 1e-8)) {
        throw std::invalid_argument("extract_error_params: input is not unitary");
    }
    const Unitary2 nominal = rotation_unitary(nominal_axis(id), nominal_angle(id));
    const AxisAngle rel = axis_angle_of(nominal.adjoint() * u);
    if (rel.angle > 0.3) {
        throw std::runtime_error(std::string("extract_error_params: not a calibration pulse (") +
                                 pulse_name(id) + " is " + std::to_string(rel.angle) +
                                 " rad from nominal)");
    }
    AxisAngle aa = axis_angle_of(u);
    if (aa.axis_indeterminate) {
        throw std::runtime_error("extract_error_params: rotation axis indeterminate");
    }
    Eigen::Vector3d n = aa.axis;
    double theta = aa.angle;
    // Orient the axis toward the nominal one, then take the 2*pi branch of the
    // angle closest to the nominal angle.
    if (n.dot(nominal_axis(id)) < 0.0) {
        n = -n;
        theta = -theta;
    }
    const double t0 = nominal_angle(id);
    double best = theta;
    for (double cand : {theta - 2.0 * M_PI, theta + 2.0 * M_PI}) {
        if (std::abs(cand - t0) < std::abs(best - t0)) best = cand;
    }
    ExtractedPulseError out;
    out.angle_error = 0.5 * (best - t0);
    const double lead = is_x_pulse(id) ? n.x() : n.y();
    // Guarded by the 0.3 rad gate: the dominant component cannot vanish here.
    if (is_x_pulse(id)) {
        out.axis_inplane = n.y() / lead;
    } else {
        out.axis_inplane = n.x() / lead;
    }
    out.axis_z = n.z() / lead;
    return out;
}

// Rotate every pulse axis about z so that the half_pi_x axis has no y
// component.  The twelve signals of the protocol are invariant under this
// rotation, so only the gauge-fixed parameters are physically comparable.
// Exact at any parameter size; angle errors are untouched.
inline PulseErrorParams gauge_fix(const PulseErrorParams& p) {
    const double g = -std::atan(p.epsp_y);
    const double cg = std::cos(g);
    const double sg = std::sin(g);
    const auto rot_x_axis = [&](double ey, double ez, double& ey_out, double& ez_out) {
        const double den = cg - ey * sg;
        ey_out = (sg + ey * cg) / den;
        ez_out = ez / den;
    };
    const auto rot_y_axis = [&](double vx, double vz, double& vx_out, double& vz_out) {
        const double den = vx * sg + cg;
        vx_out = (vx * cg - sg) / den;
        vz_out = vz / den;
    };
    PulseErrorParams out = p;
    rot_x_axis(p.eps_y, p.eps_z, out.eps_y, out.eps_z);
    rot_x_axis(p.epsp_y, p.epsp_z, out.epsp_y, out.epsp_z);
    rot_y_axis(p.v_x, p.v_z, out.v_x, out.v_z);
    rot_y_axis(p.vp_x, p.vp_z, out.vp_x, out.vp_z);
    out.epsp_y = 0.0;  // exact by the choice of g; pin against rounding
    return out;
}

// The four pulses as concrete unitaries.  Sequences are simulated from one of
// these, so drivers can also fill it from integrated waveforms or from
// unitaries built outside the parameter range.
struct PulseSet {
    std::array<Unitary2, kPulseCount> u;

    const Unitary2& operator[](PulseId id) const { return u[static_cast<int>(id)]; }
    Unitary2& operator[](PulseId id) { return u[static_cast<int>(id)]; }

    static PulseSet ideal() {
        PulseSet s;
        for (int k = 0; k < kPulseCount; ++k) {
            const PulseId id = static_cast<PulseId>(k);
            s.u[k] = rotation_unitary(nominal_axis(id), nominal_angle(id));
        }
        return s;
    }

    static PulseSet from_params(const PulseErrorParams& p) {
        p.validate();
        PulseSet s;
        for (int k = 0; k < kPulseCount; ++k) {
            s.u[k] = detail::imperfect_unitary_unchecked(p, static_cast<PulseId>(k));
        }
        return s;
    }
};

// Extract all twelve error parameters from a pulse set.  The result is in the
// raw (not gauge-fixed) parametrization.
inline PulseErrorParams extract_all_params(const PulseSet& set) {
    PulseErrorParams p;
    const ExtractedPulseError pix = extract_error_params(set[PulseId::PiX], PulseId::PiX);
    const ExtractedPulseError hpx = extract_error_params(set[PulseId::HalfPiX], PulseId::HalfPiX);
    const ExtractedPulseError piy = extract_error_params(set[PulseId::PiY], PulseId::PiY);
    const ExtractedPulseError hpy = extract_error_params(set[PulseId::HalfPiY], PulseId::HalfPiY);
    p.phi = pix.angle_error;
    p.eps_y = pix.axis_inplane;
    p.eps_z = pix.axis_z;
    p.phi_p = hpx.angle_error;
    p.epsp_y = hpx.axis_inplane;
    p.epsp_z = hpx.axis_z;
    p.chi = piy.angle_error;
    p.v_x = piy.axis_inplane;
    p.v_z = piy.axis_z;
    p.chi_p = hpy.angle_error;
    p.vp_x = hpy.axis_inplane;
    p.vp_z = hpy.axis_z;
    return p;
}

// Trapezoidal drive envelope in the rotating frame:
//   H(t) = detuning/2 * sigma_z + Omega(t)/2 * (cos(phase) sigma_x + sin(phase) sigma_y)
// with Omega ramping linearly over edge_duration on both sides of a flat top.
struct PhysicalPulseConfig {
    double rabi_amplitude = 0.0;  // peak Rabi angular frequency, rad/s
    double detuning = 0.0;        // rad/s
    double carrier_phase = 0.0;   // rad; 0 drives about x, pi/2 about y
    double flat_duration = 0.0;   // s
    double edge_duration = 0.0;   // s, per side
    double time_step = 0.0;       // s

    void validate() const {
        if (!(rabi_amplitude >= 0.0) || !std::isfinite(rabi_amplitude) || !std::isfinite(detuning)) {
            throw std::invalid_argument("PhysicalPulseConfig: bad amplitude or detuning");
        }
        if (!(flat_duration >= 0.0) || !(edge_duration >= 0.0)) {
            throw std::invalid_argument("PhysicalPulseConfig: durations must be nonnegative");
        }
        const double total = flat_duration + 2.0 * edge_duration;
        if (total > 0.0 && !(time_step > 0.0)) {
            throw std::invalid_argument("PhysicalPulseConfig: time_step must be positive");
        }
        if (edge_duration > 0.0 && time_step > edge_duration / 4.0) {
            throw std::invalid_argument("PhysicalPulseConfig: time_step must resolve the ramps (<= edge/4)");
        }
    }
};

// Time-ordered propagator of the trapezoidal pulse.  Each step uses the
// envelope at the step midpoint and the exact rotation for that constant
// Hamiltonian, so only the envelope sampling is approximate; halving
// time_step must not move the result by more than ~1e-6.
inline Unitary2 integrate_pulse(const PhysicalPulseConfig& cfg) {
    cfg.validate();
    Complex2x2 acc = Complex2x2::Identity();
    const double total = cfg.flat_duration + 2.0 * cfg.edge_duration;
    if (total <= 0.0) {
        return acc;
    }
    const double cph = std::cos(cfg.carrier_phase);
    const double sph = std::sin(cfg.carrier_phase);
    const auto advance = [&](double t0, double t1, auto&& envelope) {
        if (!(t1 > t0)) return;
        const int n = std::max(1, static_cast<int>(std::ceil((t1 - t0) / cfg.time_step - 1e-12)));
        const double h = (t1 - t0) / n;
        for (int k = 0; k < n; ++k) {
            const double om = envelope(t0 + (k + 0.5) * h);
            const Eigen::Vector3d w(om * cph, om * sph, cfg.detuning);
            const double wn = w.norm();
            if (wn * h == 0.0) continue;
            acc = rotation_unitary(w / wn, wn * h) * acc;
        }
    };
    const double e = cfg.edge_duration;
    advance(0.0, e, [&](double t) { return cfg.rabi_amplitude * (t / e); });
    advance(e, e + cfg.flat_duration, [&](double) { return cfg.rabi_amplitude; });
    advance(e + cfg.flat_duration, total, [&](double t) { return cfg.rabi_amplitude * ((total - t) / e); });
    return acc;
}

// Flat-top length that makes the resonant trapezoid area equal target_angle:
// area = rabi * (flat + edge).
inline double calibrated_flat_duration(double rabi_amplitude, double edge_duration, double target_angle) {
    if (!(rabi_amplitude > 0.0)) {
        throw std::invalid_argument("calibrated_flat_duration: rabi_amplitude must be positive");
    }
    const double flat = target_angle / rabi_amplitude - edge_duration;
    if (flat < 0.0) {
        throw std::invalid_argument("calibrated_flat_duration: edges alone exceed the target area");
    }
    return flat;
}

// The four calibration pulses as integrated waveforms, all sharing one
// amplitude, detuning and edge shape.  On resonance and with time_step fine
// enough this reproduces the nominal pulses; off resonance it is the physical
// source of correlated angle and axis errors.
inline PulseSet integrate_pulse_set(double rabi_amplitude,
                                    double detuning,
                                    double edge_duration,
                                    double time_step) {
    PulseSet s;
    for (int k = 0; k < kPulseCount; ++k) {
        const PulseId id = static_cast<PulseId>(k);
        PhysicalPulseConfig cfg;
        cfg.rabi_amplitude = rabi_amplitude;
        cfg.detuning = detuning;
        cfg.carrier_phase = is_x_pulse(id) ? 0.0 : M_PI / 2;
        cfg.edge_duration = edge_duration;
        cfg.flat_duration = calibrated_flat_duration(rabi_amplitude, edge_duration, nominal_angle(id));
        cfg.time_step = time_step;
        s.u[k] = integrate_pulse(cfg);
    }
    return s;
}

}  // namespace btomo

#endif
