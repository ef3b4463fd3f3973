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

#ifndef JCASWAVE_NUMERIC_HPP
#define JCASWAVE_NUMERIC_HPP

#include <cmath>

namespace jcaswave {

/// Kahan compensated accumulator for the per-subcarrier reductions, so the
/// summation error stays below the 1e-12 reproducibility budget.
class KahanSum {
  public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

  private:
    double s_ = 0.0;
    double c_ = 0.0;
};

inline double log2_1p(double x) { return std::log1p(x) / M_LN2; }

inline double db_from_power(double ratio) { return 10.0 * std::log10(ratio); }

}  // namespace jcaswave

#endif  // JCASWAVE_NUMERIC_HPP
