// SPDX-License-Identifier: Apache-2.0
//
// jcaswave: waveform optimization for broadband joint communication and
// radar sensing (JCAS) systems.
// Copyright (C) 2026 The jcaswave authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#ifndef JCASWAVE_SCENARIO_HPP
#define JCASWAVE_SCENARIO_HPP

#include <cstdint>

namespace jcaswave {

/// All scalar system parameters of one simulated deployment.
///
/// A base station with an N-antenna ULA serves U single-antenna users over
/// K OFDM subcarriers while sensing L targets through a dedicated receive
/// antenna. Powers and noise variances are linear (not dB).
struct ScenarioConfig {
    int n_antennas = 16;        // N, transmit ULA size
    int n_users = 2;            // U
    int n_subcarriers = 16;     // K
    int n_targets = 3;          // L
    int n_paths_per_user = 3;   // L_u
    double symbol_period = 2.0e-4;   // T [s], OFDM symbol exclusive of CP
    double cp_length = 1.0e-4;       // T_C [s]
    double tx_power = 1.0;           // P [W]
    double noise_var_radar = 1.0;    // sigma^2 at the sensing receiver
    double noise_var_comm = 1.0;     // sigma_1^2 at each user
    double mui_weight = 5.0;         // mu, ECG-vs-MUI balance in the J bound
    std::uint64_t rng_seed = 1;

    // Index of the first subcarrier. The i-th synthesized subcarrier uses
    // k = subcarrier_offset + i in every phase term; offset 1 reproduces
    // 1-based subcarrier sums, offset 0 the baseband indexing.
    int subcarrier_offset = 0;

    /// Throws std::invalid_argument when a parameter is out of range.
    void validate() const;

    int subcarrier_index(int i) const { return subcarrier_offset + i; }
};

}  // namespace jcaswave

#endif  // JCASWAVE_SCENARIO_HPP
