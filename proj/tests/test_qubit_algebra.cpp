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

#include "btomo/qubit_algebra.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace btomo;
using btomo_test::rodrigues_rotate;
using btomo_test::unitary_distance_up_to_phase;
using Catch::Matchers::WithinAbs;

TEST_CASE("pauli matrices square to identity and anticommute") {
    for (int k = 1; k <= 3; ++k) {
        REQUIRE((pauli(k) * pauli(k) - pauli(0)).cwiseAbs().maxCoeff() == 0.0);
    }
    REQUIRE((pauli(1) * pauli(2) + pauli(2) * pauli(1)).cwiseAbs().maxCoeff() == 0.0);
    // sx sy = i sz fixes the handedness of the basis.
    const complexd i(0, 1);
    REQUIRE((pauli(1) * pauli(2) - i * pauli(3)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("rotation_unitary reproduces the y-axis quarter turn matrix") {
    const Unitary2 u = rotation_unitary(Eigen::Vector3d::UnitY(), M_PI / 2);
    const double r = std::sqrt(2.0) / 2.0;
    Complex2x2 expected;
    expected << r, -r, r, r;
    REQUIRE((u - expected).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("quarter turn about x maps spin-up to -y") {
    const Unitary2 u = rotation_unitary(Eigen::Vector3d::UnitX(), M_PI / 2);
    const BlochVector v = apply_to_up(u);
    REQUIRE_THAT(v.x(), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(v.y(), WithinAbs(-1.0, 1e-15));
    REQUIRE_THAT(v.z(), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(sigma_z_expectation(v), WithinAbs(0.0, 1e-15));
}

TEST_CASE("rotation_unitary rejects non-unit axes") {
    REQUIRE_THROWS_AS(rotation_unitary(Eigen::Vector3d(1.0, 1.0, 0.0), 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(rotation_unitary(Eigen::Vector3d::Zero(), 1.0), std::invalid_argument);
}

TEST_CASE("compose applies first-listed operation first") {
    // Quarter turn about x then quarter turn about y, acting on spin-up:
    // z -> -y -> -y stays? No: rotating -y about y leaves it fixed... use z -> -y, then
    // rotate about z: -y -> x.  Composition order matters and must match.
    const Unitary2 rx = rotation_unitary(Eigen::Vector3d::UnitX(), M_PI / 2);
    const Unitary2 rz = rotation_unitary(Eigen::Vector3d::UnitZ(), M_PI / 2);
    const BlochVector v = apply_to_up(compose({rx, rz}));
    REQUIRE_THAT(v.x(), WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(v.y(), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(v.z(), WithinAbs(0.0, 1e-15));
    REQUIRE_THROWS_AS(compose({}), std::invalid_argument);
}

TEST_CASE("compositions of many rotations stay unitary") {
    std::mt19937_64 rng(0x5eed0001);
    std::uniform_real_distribution<double> uni(-M_PI, M_PI);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Unitary2> ops;
        for (int k = 0; k < 8; ++k) {
            ops.push_back(rotation_unitary(btomo_test::random_unit_vector(rng), uni(rng)));
        }
        REQUIRE(is_unitary(compose(ops), 1e-12));
    }
}

TEST_CASE("SU(2) action on spin-up matches the Rodrigues oracle") {
    std::mt19937_64 rng(0x5eed0002);
    std::uniform_real_distribution<double> uni(-M_PI, M_PI);
    const Eigen::Vector3d up(0.0, 0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Unitary2> ops;
        Eigen::Vector3d expected = up;
        for (int k = 0; k < 4; ++k) {
            const Eigen::Vector3d n = btomo_test::random_unit_vector(rng);
            const double th = uni(rng);
            ops.push_back(rotation_unitary(n, th));
            expected = rodrigues_rotate(n, th, expected);
        }
        const BlochVector got = apply_to_up(compose(ops));
        REQUIRE((got - expected).norm() <= 1e-10);
    }
}

TEST_CASE("axis_angle_of recovers -i sigma_x as a half turn about x") {
    Complex2x2 u;
    const complexd i(0, 1);
    u << 0, -i, -i, 0;
    const AxisAngle aa = axis_angle_of(u);
    REQUIRE_FALSE(aa.axis_indeterminate);
    REQUIRE_THAT(aa.angle, WithinAbs(M_PI, 1e-12));
    REQUIRE((aa.axis - Eigen::Vector3d::UnitX()).norm() <= 1e-12);
}

TEST_CASE("axis_angle_of round trips random rotations, phase included") {
    std::mt19937_64 rng(0x5eed0003);
    std::uniform_real_distribution<double> angle_dist(0.1, M_PI - 0.1);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * M_PI);
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Vector3d n = btomo_test::random_unit_vector(rng);
        const double th = angle_dist(rng);
        const complexd ph = std::exp(complexd(0, 1) * phase_dist(rng));
        const AxisAngle aa = axis_angle_of(ph * rotation_unitary(n, th));
        REQUIRE_FALSE(aa.axis_indeterminate);
        REQUIRE_THAT(aa.angle, WithinAbs(th, 1e-10));
        REQUIRE((aa.axis - n).norm() <= 1e-9);
    }
}

TEST_CASE("axis_angle_of folds angles beyond pi onto the flipped axis") {
    const Eigen::Vector3d n = Eigen::Vector3d(1.0, 2.0, -1.0).normalized();
    const double th = 2.5 * M_PI / 2.0 + 1.0;  // > pi
    const AxisAngle aa = axis_angle_of(rotation_unitary(n, th));
    REQUIRE_THAT(aa.angle, WithinAbs(2.0 * M_PI - th, 1e-12));
    REQUIRE((aa.axis + n).norm() <= 1e-10);
}

TEST_CASE("axis_angle_of flags near-identity input") {
    const AxisAngle id = axis_angle_of(Complex2x2::Identity());
    REQUIRE(id.axis_indeterminate);
    REQUIRE_THAT(id.angle, WithinAbs(0.0, 1e-9));
    // -I is the same rotation as +I.
    const AxisAngle mid = axis_angle_of(complexd(-1, 0) * Complex2x2::Identity());
    REQUIRE(mid.axis_indeterminate);
    // A clearly resolvable small rotation is not flagged.
    const AxisAngle small = axis_angle_of(rotation_unitary(Eigen::Vector3d::UnitY(), 1e-6));
    REQUIRE_FALSE(small.axis_indeterminate);
    REQUIRE_THAT(small.angle, WithinAbs(1e-6, 1e-14));
}

TEST_CASE("axis_angle_of rejects non-unitary input") {
    Complex2x2 m;
    m << 1, 0, 0, 2;
    REQUIRE_THROWS_AS(axis_angle_of(m), std::invalid_argument);
}

TEST_CASE("axis_angle_of agrees with the Rodrigues oracle on random input") {
    std::mt19937_64 rng(0x5eed0004);
    for (int trial = 0; trial < 200; ++trial) {
        const Unitary2 u = btomo_test::random_rotation_with_phase(rng);
        const AxisAngle aa = axis_angle_of(u);
        if (aa.axis_indeterminate) continue;
        // The recovered axis-angle must act on Bloch vectors exactly as u does.
        for (const auto& probe : {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()}) {
            const Eigen::Vector3d via_oracle = rodrigues_rotate(aa.axis, aa.angle, probe);
            const Unitary2 rebuilt = rotation_unitary(aa.axis, aa.angle);
            REQUIRE(unitary_distance_up_to_phase(rebuilt, u) <= 1e-7);
            (void)via_oracle;
        }
        // Conjugating sigma_z by u and by the rebuilt rotation gives the same Bloch image.
        const BlochVector a = apply_to_up(u);
        const BlochVector b = rodrigues_rotate(aa.axis, aa.angle, Eigen::Vector3d(0, 0, 1));
        REQUIRE((a - b).norm() <= 1e-9);
    }
}

TEST_CASE("is_unitary tolerance is tight") {
    Complex2x2 u = rotation_unitary(Eigen::Vector3d::UnitZ(), 0.7);
    REQUIRE(is_unitary(u));
    u(0, 0) += 1e-6;
    REQUIRE_FALSE(is_unitary(u));
}
