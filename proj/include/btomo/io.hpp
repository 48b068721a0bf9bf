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

#ifndef BTOMO_IO_HPP
#define BTOMO_IO_HPP

#include <array>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "btomo/experiments.hpp"

// File formats.
//
// Configs are a single JSON document; tabular results are CSV with a header
// row and a fixed column order; chi matrices are embedded in JSON reports as
// sixteen row-major [re, im] pairs.  Angles are radians everywhere except
// sweep grids, which are degrees; every angle-valued field name carries a
// _rad or _deg suffix so the unit is part of the name.  Parsers are strict:
// an unknown or ill-typed field is an error that names the offender, never a
// silent default.
//
// All numeric output goes through snprintf with the C locale and a fixed
// format, so a rerun of any writer is byte-identical.

namespace btomo {

// ---------------------------------------------------------------------------
// Plain file helpers

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open for reading: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

namespace detail {

// %.17g round-trips a double exactly; %.12g is for plot-ready curve files.
inline std::string fmt_double(double v, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

inline void require_object(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) {
        throw std::invalid_argument(where + ": expected a JSON object");
    }
}

inline void reject_unknown_fields(const nlohmann::json& j, const std::vector<const char*>& allowed,
                                  const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* name : allowed) {
            if (it.key() == name) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw std::invalid_argument(where + ": unknown field \"" + it.key() + "\"");
        }
    }
}

inline double get_number(const nlohmann::json& j, const char* key, double fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) {
        throw std::invalid_argument(where + "." + key + ": expected a number");
    }
    return v.get<double>();
}

inline long long get_integer(const nlohmann::json& j, const char* key, long long fallback,
                             const std::string& where) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer()) {
        throw std::invalid_argument(where + "." + key + ": expected an integer");
    }
    return v.get<long long>();
}

inline bool get_bool(const nlohmann::json& j, const char* key, bool fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_boolean()) {
        throw std::invalid_argument(where + "." + key + ": expected a boolean");
    }
    return v.get<bool>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Error parameters <-> JSON
//
// The four rotation-angle errors carry the _rad suffix; the eight axis
// components are dimensionless ratios and stay bare.

inline const std::array<const char*, PulseErrorParams::kCount>& param_field_names() {
    static const std::array<const char*, PulseErrorParams::kCount> n = {
        "phi_rad", "eps_y", "eps_z", "phi_p_rad", "epsp_y", "epsp_z",
        "chi_rad", "v_x",   "v_z",   "chi_p_rad", "vp_x",   "vp_z",
    };
    return n;
}

inline nlohmann::json params_to_json(const PulseErrorParams& p) {
    nlohmann::json j = nlohmann::json::object();
    const auto a = p.to_array();
    for (int k = 0; k < PulseErrorParams::kCount; ++k) {
        j[param_field_names()[k]] = a[k];
    }
    return j;
}

// Missing fields mean a perfect pulse in that coordinate; unknown fields are
// rejected.
inline PulseErrorParams params_from_json(const nlohmann::json& j, const std::string& where) {
    detail::require_object(j, where);
    std::vector<const char*> allowed(param_field_names().begin(), param_field_names().end());
    detail::reject_unknown_fields(j, allowed, where);
    std::array<double, PulseErrorParams::kCount> a{};
    for (int k = 0; k < PulseErrorParams::kCount; ++k) {
        a[k] = detail::get_number(j, param_field_names()[k], 0.0, where);
    }
    return PulseErrorParams::from_array(a);
}

// ---------------------------------------------------------------------------
// Config document
//
// One JSON file configures every subcommand; each section is optional and
// each tool reads only the sections it needs.

struct PhysicalSettings {
    double rabi_amplitude = 2 * M_PI * 125e6;  // rad/s
    double detuning = 0.0;                     // rad/s
    double edge_duration = 1e-9;               // s
    double time_step = 10e-12;                 // s
};

struct PhaseGrid {
    double start_deg = -30.0;
    double stop_deg = 30.0;
    int count = 13;
};

struct DetuningGrid {
    double start_mhz = -40.0;
    double stop_mhz = 40.0;
    int count = 13;
};

struct QptSettings {
    QptProcess process = QptProcess::PiY;
    bool enforce_tp = true;
    int refit_iterations = 12;
};

struct RunConfig {
    std::optional<PulseErrorParams> params;
    std::optional<PhysicalSettings> physical_pulse;
    std::optional<ShotConfig> shots;
    PhaseGrid phase_sweep;
    DetuningGrid detuning_sweep;
    QptSettings qpt;
};

namespace detail {

inline PhysicalSettings physical_from_json(const nlohmann::json& j) {
    const std::string where = "config.physical_pulse";
    require_object(j, where);
    reject_unknown_fields(
        j, {"rabi_amplitude_rad_per_s", "detuning_rad_per_s", "edge_duration_s", "time_step_s"}, where);
    PhysicalSettings s;
    s.rabi_amplitude = get_number(j, "rabi_amplitude_rad_per_s", s.rabi_amplitude, where);
    s.detuning = get_number(j, "detuning_rad_per_s", s.detuning, where);
    s.edge_duration = get_number(j, "edge_duration_s", s.edge_duration, where);
    s.time_step = get_number(j, "time_step_s", s.time_step, where);
    if (!(s.rabi_amplitude > 0.0)) {
        throw std::invalid_argument(where + ".rabi_amplitude_rad_per_s: must be positive");
    }
    if (!(s.edge_duration >= 0.0) || !(s.time_step > 0.0)) {
        throw std::invalid_argument(where + ": durations must be nonnegative and time_step_s positive");
    }
    return s;
}

inline ShotConfig shots_from_json(const nlohmann::json& j) {
    const std::string where = "config.shots";
    require_object(j, where);
    reject_unknown_fields(j, {"shots_per_sequence", "seed"}, where);
    ShotConfig s;
    s.shots_per_sequence = get_integer(j, "shots_per_sequence", s.shots_per_sequence, where);
    const long long seed = get_integer(j, "seed", 0, where);
    if (seed < 0) {
        throw std::invalid_argument(where + ".seed: must be nonnegative");
    }
    s.seed = static_cast<uint64_t>(seed);
    s.validate();
    return s;
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& doc) {
    const std::string where = "config";
    detail::require_object(doc, where);
    detail::reject_unknown_fields(
        doc, {"params", "physical_pulse", "shots", "phase_sweep", "detuning_sweep", "qpt"}, where);
    RunConfig cfg;
    if (doc.contains("params")) {
        cfg.params = params_from_json(doc.at("params"), "config.params");
    }
    if (doc.contains("physical_pulse")) {
        cfg.physical_pulse = detail::physical_from_json(doc.at("physical_pulse"));
    }
    if (doc.contains("shots")) {
        cfg.shots = detail::shots_from_json(doc.at("shots"));
    }
    if (doc.contains("phase_sweep")) {
        const auto& j = doc.at("phase_sweep");
        const std::string w = "config.phase_sweep";
        detail::require_object(j, w);
        detail::reject_unknown_fields(j, {"start_deg", "stop_deg", "count"}, w);
        cfg.phase_sweep.start_deg = detail::get_number(j, "start_deg", cfg.phase_sweep.start_deg, w);
        cfg.phase_sweep.stop_deg = detail::get_number(j, "stop_deg", cfg.phase_sweep.stop_deg, w);
        cfg.phase_sweep.count = static_cast<int>(detail::get_integer(j, "count", cfg.phase_sweep.count, w));
        if (cfg.phase_sweep.count < 1) {
            throw std::invalid_argument(w + ".count: must be at least 1");
        }
    }
    if (doc.contains("detuning_sweep")) {
        const auto& j = doc.at("detuning_sweep");
        const std::string w = "config.detuning_sweep";
        detail::require_object(j, w);
        detail::reject_unknown_fields(j, {"start_mhz", "stop_mhz", "count"}, w);
        cfg.detuning_sweep.start_mhz = detail::get_number(j, "start_mhz", cfg.detuning_sweep.start_mhz, w);
        cfg.detuning_sweep.stop_mhz = detail::get_number(j, "stop_mhz", cfg.detuning_sweep.stop_mhz, w);
        cfg.detuning_sweep.count =
            static_cast<int>(detail::get_integer(j, "count", cfg.detuning_sweep.count, w));
        if (cfg.detuning_sweep.count < 1) {
            throw std::invalid_argument(w + ".count: must be at least 1");
        }
    }
    if (doc.contains("qpt")) {
        const auto& j = doc.at("qpt");
        const std::string w = "config.qpt";
        detail::require_object(j, w);
        detail::reject_unknown_fields(j, {"process", "enforce_tp", "refit_iterations"}, w);
        if (j.contains("process")) {
            const auto& v = j.at("process");
            if (!v.is_string()) {
                throw std::invalid_argument(w + ".process: expected \"identity\" or \"pi_y\"");
            }
            const std::string name = v.get<std::string>();
            if (name == "identity") {
                cfg.qpt.process = QptProcess::Identity;
            } else if (name == "pi_y") {
                cfg.qpt.process = QptProcess::PiY;
            } else {
                throw std::invalid_argument(w + ".process: expected \"identity\" or \"pi_y\", got \"" + name +
                                            "\"");
            }
        }
        cfg.qpt.enforce_tp = detail::get_bool(j, "enforce_tp", cfg.qpt.enforce_tp, w);
        cfg.qpt.refit_iterations =
            static_cast<int>(detail::get_integer(j, "refit_iterations", cfg.qpt.refit_iterations, w));
        if (cfg.qpt.refit_iterations < 0) {
            throw std::invalid_argument(w + ".refit_iterations: must be nonnegative");
        }
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config " + path + ": " + e.what());
    }
    return parse_config(doc);
}

// ---------------------------------------------------------------------------
// Signals table CSV
//
// One row per protocol sequence.  shots = 0 marks an exact (noise-free) row;
// sampled rows carry their counts and the binomial standard error.

struct SignalRow {
    SequenceId id = SequenceId::B1S1;
    long long shots = 0;
    long long up_counts = 0;
    double signal = 0.0;
    double std_error = 0.0;
};

using SignalTable = std::array<SignalRow, kSequenceCount>;

inline const char* kSignalsCsvHeader = "sequence,shots,up_counts,signal,stderr";

inline SignalTable exact_signal_rows(const SignalVector& sv) {
    SignalTable t;
    for (int k = 0; k < kSequenceCount; ++k) {
        t[k].id = static_cast<SequenceId>(k);
        t[k].signal = sv.values[k];
    }
    return t;
}

// Streams match sample_signals(sv, cfg, 0): regenerating any one row stands
// alone.
inline SignalTable sampled_signal_rows(const SignalVector& exact, const ShotConfig& cfg) {
    SignalTable t;
    for (int k = 0; k < kSequenceCount; ++k) {
        const MeasurementRecord rec = sample_signal(exact.values[k], cfg, static_cast<uint64_t>(k));
        t[k].id = static_cast<SequenceId>(k);
        t[k].shots = rec.shots;
        t[k].up_counts = rec.up_counts;
        t[k].signal = rec.signal_estimate;
        t[k].std_error = rec.std_error;
    }
    return t;
}

inline std::string signals_to_csv(const SignalTable& t) {
    std::string out = kSignalsCsvHeader;
    out += '\n';
    for (const SignalRow& r : t) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s,%lld,%lld,%.17g,%.17g\n", sequence_name(r.id), r.shots,
                      r.up_counts, r.signal, r.std_error);
        out += buf;
    }
    return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double_field(const std::string& s, const std::string& where) {
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(where + ": not a number: \"" + s + "\"");
    }
}

inline long long parse_count_field(const std::string& s, const std::string& where) {
    try {
        size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        if (v < 0) throw std::invalid_argument("negative");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(where + ": not a nonnegative integer: \"" + s + "\"");
    }
}

}  // namespace detail

inline SignalTable signals_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("signals csv: empty file");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kSignalsCsvHeader) {
        throw std::invalid_argument(std::string("signals csv: expected header \"") + kSignalsCsvHeader +
                                    "\", got \"" + line + "\"");
    }
    SignalTable t;
    std::array<bool, kSequenceCount> seen{};
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = "signals csv line " + std::to_string(lineno);
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 5) {
            throw std::invalid_argument(where + ": expected 5 fields, got " +
                                        std::to_string(fields.size()));
        }
        SignalRow r;
        const std::optional<SequenceId> id = parse_sequence_name(fields[0]);
        if (!id) {
            throw std::invalid_argument(where + ": unknown sequence \"" + fields[0] + "\"");
        }
        r.id = *id;
        r.shots = detail::parse_count_field(fields[1], where + " shots");
        r.up_counts = detail::parse_count_field(fields[2], where + " up_counts");
        r.signal = detail::parse_double_field(fields[3], where + " signal");
        r.std_error = detail::parse_double_field(fields[4], where + " stderr");
        if (r.up_counts > r.shots) {
            throw std::invalid_argument(where + ": up_counts exceeds shots");
        }
        if (!(r.signal >= -1.0 && r.signal <= 1.0)) {
            throw std::invalid_argument(where + ": signal outside [-1, 1]");
        }
        if (!(r.std_error >= 0.0)) {
            throw std::invalid_argument(where + ": stderr must be nonnegative");
        }
        const int idx = static_cast<int>(r.id);
        if (seen[idx]) {
            throw std::invalid_argument(where + ": duplicate sequence " + sequence_name(r.id));
        }
        seen[idx] = true;
        t[idx] = r;
    }
    for (int k = 0; k < kSequenceCount; ++k) {
        if (!seen[k]) {
            throw std::invalid_argument(std::string("signals csv: missing sequence ") +
                                        sequence_name(static_cast<SequenceId>(k)));
        }
    }
    return t;
}

// Exact tables (every stderr zero) become plain signal vectors; sampled
// tables (every stderr positive) keep their uncertainties.  A mix would make
// the covariance meaningless, so it is rejected.
inline SignalVector to_signal_vector(const SignalTable& t) {
    int with_err = 0;
    for (const SignalRow& r : t) {
        if (r.std_error > 0.0) ++with_err;
    }
    SignalVector sv;
    for (int k = 0; k < kSequenceCount; ++k) {
        sv.values[k] = t[k].signal;
    }
    if (with_err == kSequenceCount) {
        sv.stderrs = std::array<double, kSequenceCount>{};
        for (int k = 0; k < kSequenceCount; ++k) {
            (*sv.stderrs)[k] = t[k].std_error;
        }
    } else if (with_err != 0) {
        throw std::invalid_argument("signals csv: mixed exact and sampled rows");
    }
    return sv;
}

// ---------------------------------------------------------------------------
// Estimate report JSON

inline nlohmann::json estimate_report_to_json(const EstimateReport& rep) {
    nlohmann::json j;
    j["parameters"] = params_to_json(rep.params);
    if (rep.has_uncertainty) {
        nlohmann::json se = nlohmann::json::object();
        for (int k = 0; k < PulseErrorParams::kCount; ++k) {
            se[param_field_names()[k]] = rep.stderrs[k];
        }
        j["stderrs"] = se;
        nlohmann::json cov = nlohmann::json::array();
        for (int r = 0; r < PulseErrorParams::kCount; ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (int c = 0; c < PulseErrorParams::kCount; ++c) {
                row.push_back(rep.covariance(r, c));
            }
            cov.push_back(row);
        }
        j["covariance"] = cov;
    } else {
        j["stderrs"] = nullptr;
        j["covariance"] = nullptr;
    }
    j["consistency_residual"] = rep.consistency_residual;
    j["model_inconsistent"] = rep.model_inconsistent;
    j["linear_regime_exceeded"] = rep.linear_regime_exceeded;
    return j;
}

// ---------------------------------------------------------------------------
// Sweep CSV
//
// One row per point: the swept value, the twelve estimates, and (when the
// sweep was sampled) the twelve standard errors.

inline std::string sweep_to_csv(const char* x_name, const std::vector<SweepPoint>& points) {
    bool with_err = !points.empty();
    for (const SweepPoint& p : points) {
        with_err = with_err && p.report.has_uncertainty;
    }
    std::string out = x_name;
    for (int k = 0; k < PulseErrorParams::kCount; ++k) {
        out += ',';
        out += param_field_names()[k];
    }
    if (with_err) {
        for (int k = 0; k < PulseErrorParams::kCount; ++k) {
            out += ",stderr_";
            out += param_field_names()[k];
        }
    }
    out += '\n';
    for (const SweepPoint& p : points) {
        out += detail::fmt_double(p.x, "%.12g");
        const auto a = p.report.params.to_array();
        for (int k = 0; k < PulseErrorParams::kCount; ++k) {
            out += ',';
            out += detail::fmt_double(a[k], "%.12g");
        }
        if (with_err) {
            for (int k = 0; k < PulseErrorParams::kCount; ++k) {
                out += ',';
                out += detail::fmt_double(p.report.stderrs[k], "%.12g");
            }
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Chi matrices and tomography reports

inline nlohmann::json chi_to_json(const ChiMatrix& chi) {
    nlohmann::json a = nlohmann::json::array();
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            a.push_back({chi(r, c).real(), chi(r, c).imag()});
        }
    }
    return a;
}

inline ChiMatrix chi_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 16) {
        throw std::invalid_argument(where + ": expected 16 [re, im] pairs");
    }
    ChiMatrix chi;
    for (int k = 0; k < 16; ++k) {
        const auto& pair = j.at(k);
        if (!pair.is_array() || pair.size() != 2 || !pair.at(0).is_number() || !pair.at(1).is_number()) {
            throw std::invalid_argument(where + ": entry " + std::to_string(k) +
                                        " is not a [re, im] pair");
        }
        chi(k / 4, k % 4) = complexd(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
    return chi;
}

inline std::string qpt_curves_csv(const QptExperimentResult& res) {
    std::string out =
        "phase_deg,fidelity_raw,fidelity_corrected,hs_raw,hs_corrected,"
        "min_eigenvalue_raw,min_eigenvalue_corrected\n";
    for (const QptSweepPoint& p : res.points) {
        const double cols[7] = {p.phase_deg,           p.fidelity_raw, p.fidelity_corrected,
                                p.hs_raw,              p.hs_corrected, p.raw.min_eigenvalue,
                                p.corrected.min_eigenvalue};
        for (int k = 0; k < 7; ++k) {
            if (k) out += ',';
            out += detail::fmt_double(cols[k], "%.12g");
        }
        out += '\n';
    }
    return out;
}

inline nlohmann::json qpt_report_to_json(const QptExperimentResult& res) {
    nlohmann::json j;
    j["process"] = qpt_process_name(res.process);
    j["reference_chi_raw"] = chi_to_json(res.reference_raw);
    j["reference_chi_corrected"] = chi_to_json(res.reference_corrected);
    nlohmann::json pts = nlohmann::json::array();
    for (const QptSweepPoint& p : res.points) {
        nlohmann::json pj;
        pj["phase_deg"] = p.phase_deg;
        pj["estimated_params"] = params_to_json(p.estimated);
        pj["chi_raw"] = chi_to_json(p.raw.chi);
        pj["chi_corrected"] = chi_to_json(p.corrected.chi);
        pj["fidelity_raw"] = p.fidelity_raw;
        pj["fidelity_corrected"] = p.fidelity_corrected;
        pj["hs_raw"] = p.hs_raw;
        pj["hs_corrected"] = p.hs_corrected;
        pj["min_eigenvalue_raw"] = p.raw.min_eigenvalue;
        pj["min_eigenvalue_corrected"] = p.corrected.min_eigenvalue;
        pts.push_back(pj);
    }
    j["points"] = pts;
    return j;
}

}  // namespace btomo

#endif  // BTOMO_IO_HPP
