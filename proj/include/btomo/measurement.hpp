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

#ifndef BTOMO_MEASUREMENT_HPP
#define BTOMO_MEASUREMENT_HPP

#include <cstdint>
#include <stdexcept>

#include "btomo/protocol.hpp"

// Projective readout with finite shot counts.
//
// A signal s corresponds to the spin-up probability p = (1 + s) / 2.  Shots
// are drawn from a counter-based generator keyed on (seed, stream_id), so any
// subset of an experiment can be regenerated independently and in any order
// without changing a single count.

namespace btomo {

// One splitmix64 step: increments the state and returns a mixed output.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic stream of doubles in [0, 1), keyed on (seed, stream).
class RandomStream {
  public:
    RandomStream(uint64_t seed, uint64_t stream) : state_(seed) {
        // Two scrambles separate nearby seeds and streams.
        state_ = splitmix64(state_) ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        (void)splitmix64(state_);
    }

    uint64_t next_u64() { return splitmix64(state_); }

    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  private:
    uint64_t state_;
};

struct ShotConfig {
    long long shots_per_sequence = 10000;
    uint64_t seed = 0;

    void validate() const {
        if (shots_per_sequence < 1) {
            throw std::invalid_argument("ShotConfig: shots_per_sequence must be at least 1");
        }
    }
};

struct MeasurementRecord {
    long long shots = 0;
    long long up_counts = 0;
    double signal_estimate = 0.0;  // 2 p_hat - 1
    // Binomial error on the signal, floored at 1/shots so an estimate sitting
    // on p_hat = 0 or 1 never reports zero uncertainty.
    double std_error = 0.0;
};

// Draw `shots` projective outcomes at the given true signal.
inline MeasurementRecord sample_signal(double true_signal, const ShotConfig& cfg, uint64_t stream_id) {
    cfg.validate();
    if (!std::isfinite(true_signal) || std::abs(true_signal) > 1.0 + 1e-9) {
        throw std::invalid_argument("sample_signal: |signal| must not exceed 1");
    }
    const double p = std::clamp(0.5 * (1.0 + true_signal), 0.0, 1.0);
    RandomStream rng(cfg.seed, stream_id);
    long long up = 0;
    for (long long k = 0; k < cfg.shots_per_sequence; ++k) {
        if (rng.next_unit() < p) ++up;
    }
    MeasurementRecord rec;
    rec.shots = cfg.shots_per_sequence;
    rec.up_counts = up;
    const double p_hat = static_cast<double>(up) / static_cast<double>(rec.shots);
    rec.signal_estimate = 2.0 * p_hat - 1.0;
    const double n = static_cast<double>(rec.shots);
    rec.std_error = std::max(2.0 * std::sqrt(p_hat * (1.0 - p_hat) / n), 1.0 / n);
    return rec;
}

// Sample all twelve sequence signals.  Stream ids are `stream_base + k` for
// sequence k, so distinct experiments should space their bases by at least
// kSequenceCount.
inline SignalVector sample_signals(const SignalVector& exact,
                                   const ShotConfig& cfg,
                                   uint64_t stream_base = 0) {
    SignalVector out;
    out.stderrs = std::array<double, kSequenceCount>{};
    for (int k = 0; k < kSequenceCount; ++k) {
        const MeasurementRecord rec = sample_signal(exact.values[k], cfg, stream_base + static_cast<uint64_t>(k));
        out.values[k] = rec.signal_estimate;
        (*out.stderrs)[k] = rec.std_error;
    }
    return out;
}

}  // namespace btomo

#endif
