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

#include "jcaswave/scenario.hpp"

#include <stdexcept>
#include <string>

namespace jcaswave {

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("ScenarioConfig: " + msg); };

    if (n_users < 1) fail("n_users must be >= 1");
    if (n_antennas < n_users) fail("n_antennas must be >= n_users");
    if (n_subcarriers < 1) fail("n_subcarriers must be >= 1");
    if (n_targets < 1) fail("n_targets must be >= 1");
    if (n_paths_per_user < 1) fail("n_paths_per_user must be >= 1");
    if (!(symbol_period > 0.0)) fail("symbol_period must be positive");
    if (!(cp_length > 0.0) || !(cp_length < symbol_period))
        fail("cp_length must satisfy 0 < cp_length < symbol_period");
    if (!(tx_power > 0.0)) fail("tx_power must be positive");
    if (!(noise_var_radar > 0.0)) fail("noise_var_radar must be positive");
    if (!(noise_var_comm > 0.0)) fail("noise_var_comm must be positive");
    if (!(mui_weight > 0.0)) fail("mui_weight must be positive");
    if (subcarrier_offset < 0) fail("subcarrier_offset must be >= 0");
}

}  // namespace jcaswave
