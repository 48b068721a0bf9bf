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

#ifndef BTOMO_QUBIT_ALGEBRA_HPP
#define BTOMO_QUBIT_ALGEBRA_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

// Exact 2x2 unitary algebra for single-qubit rotation sequences.
//
// Conventions used throughout the library:
//   U = exp(-i theta (n.sigma) / 2), |n| = 1
// which acts on Bloch vectors as the right-handed rotation by theta about n.
// The spin-up state |0> has Bloch vector (0, 0, 1).

namespace btomo {

using complexd = std::complex<double>;
using Complex2x2 = Eigen::Matrix2cd;
using Unitary2 = Complex2x2;  // unitary by contract: U'U = I within 1e-12
using BlochVector = Eigen::Vector3d;

// Pauli basis, indexed 0..3 as {I, sigma_x, sigma_y, sigma_z}.
inline const Complex2x2& pauli(int k) {
    static const std::array<Complex2x2, 4> table = [] {
        std::array<Complex2x2, 4> t;
        const complexd i(0.0, 1.0);
        t[0] << 1, 0, 0, 1;
        t[1] << 0, 1, 1, 0;
        t[2] << 0, -i, i, 0;
        t[3] << 1, 0, 0, -1;
        return t;
    }();
    return table.at(static_cast<size_t>(k));
}

inline bool is_unitary(const Complex2x2& u, double tol = 1e-12) {
    return (u.adjoint() * u - Complex2x2::Identity()).cwiseAbs().maxCoeff() <= tol;
}

// U = cos(theta/2) I - i sin(theta/2) n.sigma.  The axis must be unit length.
inline Unitary2 rotation_unitary(const Eigen::Vector3d& axis, double angle) {
    if (std::abs(axis.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("rotation_unitary: axis must be unit length");
    }
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    const complexd i(0.0, 1.0);
    Complex2x2 u = c * Complex2x2::Identity()
                 - i * s * (axis.x() * pauli(1) + axis.y() * pauli(2) + axis.z() * pauli(3));
    return u;
}

struct AxisAngle {
    Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
    double angle = 0.0;  // in [0, pi]; rotation sense is carried by the axis orientation
    bool axis_indeterminate = false;
};

// Inverse of rotation_unitary up to global phase and the n -> -n, theta -> -theta
// equivalence.  The returned angle lies in [0, pi]: a rotation by theta > pi is
// reported as the rotation by 2*pi - theta about the flipped axis.  Rotations
// within ~1e-9 of the identity have no well-defined axis and are flagged.
inline AxisAngle axis_angle_of(const Unitary2& u) {
    if (!is_unitary(u, 1e-8)) {
        throw std::invalid_argument("axis_angle_of: input is not unitary");
    }
    // Quaternion components up to one global phase:
    // U = e^{ia} (q0 I - i (q1 sx + q2 sy + q3 sz)), with (q0, q1, q2, q3) real and unit.
    std::array<complexd, 4> q;
    q[0] = 0.5 * (u(0, 0) + u(1, 1));
    const complexd i(0.0, 1.0);
    q[1] = 0.5 * i * (u(0, 1) + u(1, 0));
    q[2] = 0.5 * (u(1, 0) - u(0, 1));
    q[3] = 0.5 * i * (u(0, 0) - u(1, 1));

    int imax = 0;
    double amax = 0.0;
    for (int k = 0; k < 4; ++k) {
        if (std::abs(q[k]) > amax) {
            amax = std::abs(q[k]);
            imax = k;
        }
    }
    // |q| = 1 for unitary input, so the largest component is at least 1/2.
    const complexd phase = q[imax] / std::abs(q[imax]);
    std::array<double, 4> r;
    for (int k = 0; k < 4; ++k) r[k] = std::real(q[k] / phase);
    if (r[0] < 0.0) {
        for (auto& v : r) v = -v;
    }

    AxisAngle out;
    const Eigen::Vector3d vec(r[1], r[2], r[3]);
    const double s = vec.norm();
    out.angle = 2.0 * std::atan2(s, r[0]);
    if (s < 1e-9) {
        out.axis_indeterminate = true;
        out.axis = Eigen::Vector3d::UnitZ();
    } else {
        out.axis = vec / s;
    }
    return out;
}

// Bloch vector of U|0>.
inline BlochVector apply_to_up(const Unitary2& u) {
    const complexd a = u(0, 0);
    const complexd b = u(1, 0);
    const complexd t = std::conj(a) * b;
    return BlochVector(2.0 * t.real(), 2.0 * t.imag(), std::norm(a) - std::norm(b));
}

inline double sigma_z_expectation(const BlochVector& v) {
    return v.z();
}

// Product of a pulse list given in application order (first-applied first).
inline Unitary2 compose(const std::vector<Unitary2>& ops) {
    if (ops.empty()) {
        throw std::invalid_argument("compose: empty operation list");
    }
    Complex2x2 acc = ops.front();
    for (size_t k = 1; k < ops.size(); ++k) {
        acc = ops[k] * acc;
    }
    return acc;
}

}  // namespace btomo

#endif
