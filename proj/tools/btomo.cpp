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

// Command-line front end.  Subcommands:
//
//   simulate        twelve bootstrap signals for a pulse set, as CSV
//   analyze         parameter estimate from a signals CSV, as JSON
//   sweep-phase     estimates under a swept half_pi_y carrier phase, as CSV
//   sweep-detuning  estimates for integrated detuned pulses, as CSV
//   qpt             tomography of a process under the phase sweep, as JSON
//   verify          self-verification report
//
// Exit codes: 0 on success, 2 on bad input of any kind, 3 when analyze
// --strict sees data the signal model cannot explain.

#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "btomo/io.hpp"
#include "btomo/verify.hpp"

namespace {

constexpr int kExitBadInput = 2;
constexpr int kExitInconsistent = 3;

struct ShotFlags {
    std::optional<long long> shots;
    std::optional<uint64_t> seed;
    bool exact = false;
};

void add_shot_flags(CLI::App* cmd, ShotFlags& f) {
    cmd->add_option("--shots", f.shots, "Sample each signal with this many shots");
    cmd->add_option("--seed", f.seed, "Seed for the shot sampler");
    cmd->add_flag("--exact", f.exact, "Emit exact signals, ignoring any shot settings");
}

// --exact wins outright; otherwise the command line overrides the config
// file, and sampling is active as soon as either names a shot count or seed.
std::optional<btomo::ShotConfig> resolve_shots(const std::optional<btomo::ShotConfig>& from_config,
                                               const ShotFlags& f) {
    if (f.exact) {
        return std::nullopt;
    }
    std::optional<btomo::ShotConfig> shots = from_config;
    if (f.shots || f.seed) {
        btomo::ShotConfig s = shots.value_or(btomo::ShotConfig{});
        if (f.shots) {
            s.shots_per_sequence = *f.shots;
        }
        if (f.seed) {
            s.seed = *f.seed;
        }
        s.validate();
        shots = s;
    }
    return shots;
}

btomo::RunConfig load_or_default(const std::string& path) {
    return path.empty() ? btomo::RunConfig{} : btomo::load_config(path);
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        btomo::write_text_file(out_path, text);
    }
}

int run_simulate(const std::string& config_path, const std::string& out_path, const ShotFlags& f) {
    const btomo::RunConfig cfg = load_or_default(config_path);
    if (cfg.params && cfg.physical_pulse) {
        throw std::invalid_argument("config: simulate takes params or physical_pulse, not both");
    }
    btomo::SignalVector sv;
    if (cfg.physical_pulse) {
        const btomo::PhysicalSettings& ps = *cfg.physical_pulse;
        sv = btomo::simulate_all(
            btomo::integrate_pulse_set(ps.rabi_amplitude, ps.detuning, ps.edge_duration, ps.time_step));
    } else {
        sv = btomo::simulate_all(cfg.params.value_or(btomo::PulseErrorParams{}));
    }
    const std::optional<btomo::ShotConfig> shots = resolve_shots(cfg.shots, f);
    const btomo::SignalTable rows =
        shots ? btomo::sampled_signal_rows(sv, *shots) : btomo::exact_signal_rows(sv);
    emit(out_path, btomo::signals_to_csv(rows));
    return 0;
}

int run_analyze(const std::string& input_path, const std::string& out_path, bool strict, int refit) {
    const btomo::SignalTable table = btomo::signals_from_csv(btomo::read_text_file(input_path));
    const btomo::SignalVector sv = btomo::to_signal_vector(table);
    const btomo::EstimateOptions opt{refit};
    const btomo::EstimateReport rep =
        sv.stderrs ? btomo::estimate_with_uncertainty(sv, opt) : btomo::estimate(sv, opt);
    emit(out_path, btomo::estimate_report_to_json(rep).dump(2) + "\n");
    if (strict && rep.model_inconsistent) {
        std::fprintf(stderr, "analyze: consistency residual %.6g exceeds 0.1\n",
                     rep.consistency_residual);
        return kExitInconsistent;
    }
    return 0;
}

int run_sweep_phase(const std::string& config_path, const std::string& out_path, const ShotFlags& f) {
    const btomo::RunConfig cfg = load_or_default(config_path);
    btomo::PhaseSweepConfig sweep;
    sweep.baseline = cfg.params.value_or(btomo::PulseErrorParams{});
    sweep.start_deg = cfg.phase_sweep.start_deg;
    sweep.stop_deg = cfg.phase_sweep.stop_deg;
    sweep.count = cfg.phase_sweep.count;
    sweep.shots = resolve_shots(cfg.shots, f);
    emit(out_path, btomo::sweep_to_csv("phase_deg", btomo::run_phase_sweep(sweep)));
    return 0;
}

int run_sweep_detuning(const std::string& config_path, const std::string& out_path,
                       const ShotFlags& f) {
    const btomo::RunConfig cfg = load_or_default(config_path);
    btomo::DetuningSweepConfig sweep;
    if (cfg.physical_pulse) {
        // The grid supplies the detuning; the rest of the hardware model
        // comes from the config.
        sweep.rabi_amplitude = cfg.physical_pulse->rabi_amplitude;
        sweep.edge_duration = cfg.physical_pulse->edge_duration;
        sweep.time_step = cfg.physical_pulse->time_step;
    }
    sweep.start_mhz = cfg.detuning_sweep.start_mhz;
    sweep.stop_mhz = cfg.detuning_sweep.stop_mhz;
    sweep.count = cfg.detuning_sweep.count;
    sweep.shots = resolve_shots(cfg.shots, f);
    emit(out_path, btomo::sweep_to_csv("detuning_mhz", btomo::run_detuning_sweep(sweep)));
    return 0;
}

int run_qpt(const std::string& config_path, const std::string& out_path,
            const std::string& curves_path, const ShotFlags& f) {
    const btomo::RunConfig cfg = load_or_default(config_path);
    btomo::QptExperimentConfig qpt;
    qpt.process = cfg.qpt.process;
    qpt.baseline = cfg.params.value_or(btomo::PulseErrorParams{});
    qpt.start_deg = cfg.phase_sweep.start_deg;
    qpt.stop_deg = cfg.phase_sweep.stop_deg;
    qpt.count = cfg.phase_sweep.count;
    qpt.enforce_tp = cfg.qpt.enforce_tp;
    qpt.refit_iterations = cfg.qpt.refit_iterations;
    qpt.shots = resolve_shots(cfg.shots, f);
    const btomo::QptExperimentResult res = btomo::run_qpt_experiment(qpt);
    emit(out_path, btomo::qpt_report_to_json(res).dump(2) + "\n");
    if (!curves_path.empty()) {
        btomo::write_text_file(curves_path, btomo::qpt_curves_csv(res));
    }
    return 0;
}

int run_verify(uint64_t seed, const std::string& out_path) {
    const btomo::VerificationReport report = btomo::run_verification(seed);
    emit(out_path, report.text());
    return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bootstrap pulse-error tomography toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string input_path;
    std::string curves_path;
    ShotFlags shot_flags;
    bool strict = false;
    int refit = 0;
    uint64_t verify_seed = 0;

    CLI::App* sim = app.add_subcommand("simulate", "Simulate the twelve bootstrap signals");
    sim->add_option("--config", config_path, "JSON config with pulse errors or a hardware model");
    sim->add_option("--out", out_path, "Output CSV path (stdout when omitted)");
    add_shot_flags(sim, shot_flags);

    CLI::App* ana = app.add_subcommand("analyze", "Estimate pulse errors from a signals CSV");
    ana->add_option("input", input_path, "Signals CSV produced by simulate")->required();
    ana->add_option("--out", out_path, "Output JSON path (stdout when omitted)");
    ana->add_option("--refit", refit, "Newton refinement passes against the exact model")
        ->check(CLI::NonNegativeNumber);
    ana->add_flag("--strict", strict, "Exit 3 when the data is model-inconsistent");

    CLI::App* swp = app.add_subcommand("sweep-phase", "Sweep the half_pi_y carrier phase");
    swp->add_option("--config", config_path, "JSON config with baseline errors and the grid");
    swp->add_option("--out", out_path, "Output CSV path (stdout when omitted)");
    add_shot_flags(swp, shot_flags);

    CLI::App* swd = app.add_subcommand("sweep-detuning", "Sweep the drive detuning");
    swd->add_option("--config", config_path, "JSON config with the hardware model and the grid");
    swd->add_option("--out", out_path, "Output CSV path (stdout when omitted)");
    add_shot_flags(swd, shot_flags);

    CLI::App* qpt = app.add_subcommand("qpt", "Process tomography under the phase sweep");
    qpt->add_option("--config", config_path, "JSON config with the process and the grid");
    qpt->add_option("--out", out_path, "Output JSON path (stdout when omitted)");
    qpt->add_option("--curves", curves_path, "Also write the fidelity curves as CSV");
    add_shot_flags(qpt, shot_flags);

    CLI::App* ver = app.add_subcommand("verify", "Run the self-verification suite");
    ver->add_option("--seed", verify_seed, "Seed for the randomized checks");
    ver->add_option("--out", out_path, "Report path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitBadInput;
    }

    try {
        if (sim->parsed()) {
            return run_simulate(config_path, out_path, shot_flags);
        }
        if (ana->parsed()) {
            return run_analyze(input_path, out_path, strict, refit);
        }
        if (swp->parsed()) {
            return run_sweep_phase(config_path, out_path, shot_flags);
        }
        if (swd->parsed()) {
            return run_sweep_detuning(config_path, out_path, shot_flags);
        }
        if (qpt->parsed()) {
            return run_qpt(config_path, out_path, curves_path, shot_flags);
        }
        return run_verify(verify_seed, out_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "btomo: %s\n", e.what());
        return kExitBadInput;
    }
}
