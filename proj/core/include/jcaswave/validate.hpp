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

#ifndef JCASWAVE_VALIDATE_HPP
#define JCASWAVE_VALIDATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "jcaswave/fim.hpp"

namespace jcaswave {

enum class ValidateLevel { fast, full };

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool all_passed() const;
};

/// Runs the cross-module invariant suite. `fast` trims the trial counts for
/// an under-a-minute smoke run; `full` uses the contract-level counts.
ValidationReport validate(ValidateLevel level, std::uint64_t seed = 1);

// Individual named checks, callable directly (the fixtures corrupt inputs
// and expect the named invariant to trip).
CheckResult check_fim_symmetry(const FimReport& report);
CheckResult check_fim_psd(const FimReport& report);

}  // namespace jcaswave

#endif  // JCASWAVE_VALIDATE_HPP
