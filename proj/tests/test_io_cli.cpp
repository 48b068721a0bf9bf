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

#include "btomo/io.hpp"

#include <cstdio>

#include <catch2/catch_amalgamated.hpp>

using namespace btomo;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using nlohmann::json;

TEST_CASE("parameter json round trip and defaults") {
    PulseErrorParams p;
    p.phi = 0.01;
    p.eps_y = -0.02;
    p.vp_z = 0.003;
    const json j = params_to_json(p);
    REQUIRE(j.at("phi_rad").get<double>() == 0.01);
    const PulseErrorParams q = params_from_json(j, "t");
    REQUIRE(q.to_array() == p.to_array());

    // Missing fields are perfect-pulse coordinates.
    const PulseErrorParams partial = params_from_json(json{{"vp_x", 0.25}}, "t");
    REQUIRE(partial.vp_x == 0.25);
    REQUIRE(partial.max_abs() == 0.25);
}

TEST_CASE("parameter json rejects unknown and ill-typed fields by name") {
    REQUIRE_THROWS_WITH(params_from_json(json{{"phi", 0.01}}, "config.params"),
                        ContainsSubstring("config.params") && ContainsSubstring("phi"));
    REQUIRE_THROWS_WITH(params_from_json(json{{"vp_x", "big"}}, "config.params"),
                        ContainsSubstring("vp_x") && ContainsSubstring("number"));
    REQUIRE_THROWS_AS(params_from_json(json::array(), "t"), std::invalid_argument);
}

TEST_CASE("config document defaults and sections") {
    const RunConfig empty = parse_config(json::object());
    REQUIRE_FALSE(empty.params.has_value());
    REQUIRE_FALSE(empty.shots.has_value());
    REQUIRE(empty.phase_sweep.start_deg == -30.0);
    REQUIRE(empty.phase_sweep.count == 13);
    REQUIRE(empty.detuning_sweep.stop_mhz == 40.0);
    REQUIRE(empty.qpt.process == QptProcess::PiY);
    REQUIRE(empty.qpt.enforce_tp);

    const json doc = {
        {"params", {{"phi_rad", 0.02}, {"vp_x", -0.04}}},
        {"physical_pulse", {{"rabi_amplitude_rad_per_s", 7.0e8}, {"detuning_rad_per_s", 1.0e7}}},
        {"shots", {{"shots_per_sequence", 2000}, {"seed", 42}}},
        {"phase_sweep", {{"start_deg", -15.0}, {"stop_deg", 15.0}, {"count", 7}}},
        {"detuning_sweep", {{"start_mhz", -10.0}, {"stop_mhz", 10.0}, {"count", 5}}},
        {"qpt", {{"process", "identity"}, {"enforce_tp", false}, {"refit_iterations", 4}}},
    };
    const RunConfig cfg = parse_config(doc);
    REQUIRE(cfg.params.has_value());
    REQUIRE(cfg.params->phi == 0.02);
    REQUIRE(cfg.params->vp_x == -0.04);
    REQUIRE(cfg.physical_pulse.has_value());
    REQUIRE(cfg.physical_pulse->rabi_amplitude == 7.0e8);
    REQUIRE(cfg.physical_pulse->edge_duration == 1e-9);  // default survives
    REQUIRE(cfg.shots->shots_per_sequence == 2000);
    REQUIRE(cfg.shots->seed == 42);
    REQUIRE(cfg.phase_sweep.count == 7);
    REQUIRE(cfg.detuning_sweep.start_mhz == -10.0);
    REQUIRE(cfg.qpt.process == QptProcess::Identity);
    REQUIRE_FALSE(cfg.qpt.enforce_tp);
    REQUIRE(cfg.qpt.refit_iterations == 4);
}

TEST_CASE("config rejects malformed input by name") {
    REQUIRE_THROWS_WITH(parse_config(json{{"prams", json::object()}}), ContainsSubstring("prams"));
    REQUIRE_THROWS_WITH(parse_config(json{{"shots", {{"sed", 1}}}}), ContainsSubstring("sed"));
    REQUIRE_THROWS_WITH(parse_config(json{{"shots", {{"seed", -3}}}}), ContainsSubstring("seed"));
    REQUIRE_THROWS_WITH(parse_config(json{{"shots", {{"shots_per_sequence", 0}}}}),
                        ContainsSubstring("shots_per_sequence"));
    REQUIRE_THROWS_WITH(parse_config(json{{"phase_sweep", {{"count", 0}}}}), ContainsSubstring("count"));
    REQUIRE_THROWS_WITH(parse_config(json{{"qpt", {{"process", "pi_x"}}}}), ContainsSubstring("pi_x"));
    REQUIRE_THROWS_WITH(parse_config(json{{"qpt", {{"refit_iterations", -1}}}}),
                        ContainsSubstring("refit_iterations"));
    REQUIRE_THROWS_WITH(parse_config(json{{"physical_pulse", {{"rabi_amplitude_rad_per_s", 0.0}}}}),
                        ContainsSubstring("rabi_amplitude_rad_per_s"));
    REQUIRE_THROWS_AS(parse_config(json::array()), std::invalid_argument);
}

TEST_CASE("exact signals survive the csv round trip bit for bit") {
    PulseErrorParams p;
    p.phi = 0.013;
    p.epsp_z = -0.027;
    p.v_x = 0.031;
    const SignalVector sv = simulate_all(p);
    const std::string csv = signals_to_csv(exact_signal_rows(sv));
    const SignalTable t = signals_from_csv(csv);
    const SignalVector back = to_signal_vector(t);
    REQUIRE_FALSE(back.stderrs.has_value());
    for (int k = 0; k < kSequenceCount; ++k) {
        REQUIRE(back.values[k] == sv.values[k]);
        REQUIRE(t[k].shots == 0);
    }
    // Writers are pure functions of their input.
    REQUIRE(signals_to_csv(exact_signal_rows(sv)) == csv);
}

TEST_CASE("sampled signals keep counts and uncertainties through the csv") {
    const SignalVector exact = simulate_all(PulseErrorParams{});
    const ShotConfig shots{5000, 11};
    const SignalTable t = sampled_signal_rows(exact, shots);
    const SignalTable u = signals_from_csv(signals_to_csv(t));
    for (int k = 0; k < kSequenceCount; ++k) {
        REQUIRE(u[k].shots == 5000);
        REQUIRE(u[k].up_counts == t[k].up_counts);
        REQUIRE(u[k].signal == t[k].signal);
        REQUIRE(u[k].std_error == t[k].std_error);
    }
    const SignalVector back = to_signal_vector(u);
    REQUIRE(back.stderrs.has_value());

    // Same streams as the in-memory sampler.
    const SignalVector direct = sample_signals(exact, shots, 0);
    for (int k = 0; k < kSequenceCount; ++k) {
        REQUIRE(back.values[k] == direct.values[k]);
    }
}

TEST_CASE("signals csv parser names the offending row") {
    const SignalVector sv = simulate_all(PulseErrorParams{});
    const std::string good = signals_to_csv(exact_signal_rows(sv));

    REQUIRE_THROWS_WITH(signals_from_csv(""), ContainsSubstring("empty"));
    REQUIRE_THROWS_WITH(signals_from_csv("a,b,c\n"), ContainsSubstring("header"));

    std::string dup = good;
    const size_t pos = dup.find("B1S2");
    dup.replace(pos, 4, "B1S1");
    REQUIRE_THROWS_WITH(signals_from_csv(dup),
                        ContainsSubstring("duplicate") && ContainsSubstring("B1S1"));

    std::string missing = good.substr(0, good.rfind("B3S6"));
    REQUIRE_THROWS_WITH(signals_from_csv(missing),
                        ContainsSubstring("missing") && ContainsSubstring("B3S6"));

    std::string bad_id = good;
    bad_id.replace(bad_id.find("B2S3"), 4, "B9S9");
    REQUIRE_THROWS_WITH(signals_from_csv(bad_id), ContainsSubstring("B9S9"));

    REQUIRE_THROWS_WITH(
        signals_from_csv("sequence,shots,up_counts,signal,stderr\nB1S1,10,20,0.0,0.01\n"),
        ContainsSubstring("up_counts exceeds shots"));
    REQUIRE_THROWS_WITH(signals_from_csv("sequence,shots,up_counts,signal,stderr\nB1S1,0,0,1.5,0\n"),
                        ContainsSubstring("[-1, 1]"));
    REQUIRE_THROWS_WITH(signals_from_csv("sequence,shots,up_counts,signal,stderr\nB1S1,0,0\n"),
                        ContainsSubstring("5 fields"));
    REQUIRE_THROWS_WITH(signals_from_csv("sequence,shots,up_counts,signal,stderr\nB1S1,0,0,x,0\n"),
                        ContainsSubstring("not a number"));
}

TEST_CASE("mixed exact and sampled rows are rejected") {
    const SignalVector sv = simulate_all(PulseErrorParams{});
    SignalTable t = exact_signal_rows(sv);
    t[3].std_error = 0.01;
    REQUIRE_THROWS_WITH(to_signal_vector(t), ContainsSubstring("mixed"));
}

TEST_CASE("estimate report json carries uncertainty only when present") {
    PulseErrorParams p;
    p.chi = 0.02;
    const SignalVector exact = simulate_all(p);
    const json exact_rep = estimate_report_to_json(estimate(exact));
    REQUIRE(exact_rep.at("stderrs").is_null());
    REQUIRE(exact_rep.at("covariance").is_null());
    REQUIRE(exact_rep.at("parameters").at("chi_rad").get<double>() > 0.01);
    REQUIRE_FALSE(exact_rep.at("model_inconsistent").get<bool>());

    const SignalVector sampled = sample_signals(exact, ShotConfig{2000, 5}, 0);
    const json rep = estimate_report_to_json(estimate_with_uncertainty(sampled));
    REQUIRE(rep.at("stderrs").at("chi_rad").get<double>() > 0.0);
    REQUIRE(rep.at("covariance").size() == 12);
    REQUIRE(rep.at("covariance").at(0).size() == 12);
}

TEST_CASE("sweep csv lists the swept value, estimates, and stderr columns when sampled") {
    PhaseSweepConfig cfg;
    cfg.count = 3;
    const std::string exact_csv = sweep_to_csv("phase_deg", run_phase_sweep(cfg));
    REQUIRE_THAT(exact_csv, ContainsSubstring("phase_deg,phi_rad,"));
    REQUIRE_THAT(exact_csv, !ContainsSubstring("stderr_"));
    REQUIRE(std::count(exact_csv.begin(), exact_csv.end(), '\n') == 4);

    cfg.shots = ShotConfig{1000, 3};
    const std::string sampled_csv = sweep_to_csv("phase_deg", run_phase_sweep(cfg));
    REQUIRE_THAT(sampled_csv, ContainsSubstring("stderr_vp_z"));
    REQUIRE(sweep_to_csv("phase_deg", run_phase_sweep(cfg)) == sampled_csv);
}

TEST_CASE("chi json round trip is exact") {
    const ChiMatrix chi = chi_of_unitary(rotation_unitary(Eigen::Vector3d(0, 1, 0), 1.1));
    const ChiMatrix back = chi_from_json(chi_to_json(chi), "t");
    REQUIRE((back - chi).norm() == 0.0);
    REQUIRE_THROWS_WITH(chi_from_json(json::array({1, 2}), "chi"), ContainsSubstring("16"));
    json bad = chi_to_json(chi);
    bad[3] = json::array({1.0});
    REQUIRE_THROWS_WITH(chi_from_json(bad, "chi"), ContainsSubstring("entry 3"));
}

TEST_CASE("qpt outputs carry the four curves and the chi matrices") {
    QptExperimentConfig cfg;
    cfg.count = 3;
    const QptExperimentResult res = run_qpt_experiment(cfg);
    const std::string csv = qpt_curves_csv(res);
    REQUIRE_THAT(csv, ContainsSubstring(
                          "phase_deg,fidelity_raw,fidelity_corrected,hs_raw,hs_corrected,"
                          "min_eigenvalue_raw,min_eigenvalue_corrected"));
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 4);

    const json rep = qpt_report_to_json(res);
    REQUIRE(rep.at("process") == "pi_y");
    REQUIRE(rep.at("points").size() == 3);
    const ChiMatrix ref = chi_from_json(rep.at("reference_chi_raw"), "t");
    REQUIRE((ref - res.reference_raw).norm() == 0.0);
    REQUIRE(rep.at("points").at(0).at("estimated_params").contains("vp_x"));
}

TEST_CASE("text files round trip and failures carry the path") {
    const std::string path = "/tmp/btomo_io_test.txt";
    write_text_file(path, "line\n");
    REQUIRE(read_text_file(path) == "line\n");
    std::remove(path.c_str());
    REQUIRE_THROWS_WITH(read_text_file("/nonexistent/btomo.txt"), ContainsSubstring("/nonexistent/btomo.txt"));
    REQUIRE_THROWS_WITH(write_text_file("/nonexistent/btomo.txt", "x"),
                        ContainsSubstring("/nonexistent/btomo.txt"));
}

TEST_CASE("config loader reports json syntax errors with the path") {
    const std::string path = "/tmp/btomo_bad_config.json";
    write_text_file(path, "{ not json");
    REQUIRE_THROWS_WITH(load_config(path), ContainsSubstring(path));
    write_text_file(path, R"({"params": {"vp_x": 0.1}})");
    const RunConfig cfg = load_config(path);
    REQUIRE(cfg.params->vp_x == 0.1);
    std::remove(path.c_str());
}
