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

#ifndef JCASWAVE_FIM_HPP
#define JCASWAVE_FIM_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "jcaswave/channel.hpp"
#include "jcaswave/metrics.hpp"
#include "jcaswave/scenario.hpp"

namespace jcaswave {

/// Noise prefactor of the Fisher information subblocks. `paper` keeps the
/// printed 2/sigma; `variance` uses the conventional 2/sigma^2. The choice
/// scales every subblock uniformly and is reported, never silently swapped.
enum class FimNoiseConvention { paper, variance };

class SingularFimError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Fisher information of the target parameter vector
/// Theta = [Re alpha, Im alpha, tau, Omega] (4L entries) and the derived
/// Cramer-Rao matrix B = F^{-1}.
struct FimReport {
    Eigen::MatrixXcd f1, f2, f3, f4, f5, f6;  // L x L subblocks
    Eigen::MatrixXd fim;                      // 4L x 4L real
    Eigen::MatrixXd crb;                      // valid only when crb_valid
    bool crb_valid = false;
    double condition = 0.0;   // |eig|_max / |eig|_min of fim
    double crb_total_value = 0.0;  // ||B||_F when crb_valid

    // Per-subcarrier ||F4_k||_F / ||F1_k||_F; the delay block outgrows the
    // gain block as k^2, which this exposes for diagnostics.
    std::vector<double> f4_f1_ratio;

    static constexpr const char* theta_order = "[Re alpha, Im alpha, tau, Omega]";
};

/// Assembles the analytic FIM subblocks and, when the matrix is well
/// conditioned (condition number <= 1e12), the CRB matrix.
FimReport fim(const SensingScene& scene, const PrecoderSet& prec,
              const ScenarioConfig& config,
              FimNoiseConvention convention = FimNoiseConvention::paper);

/// Total CRB ||F^{-1}||_F; throws SingularFimError when the FIM was flagged
/// singular or ill-conditioned.
double crb_total(const FimReport& report);

}  // namespace jcaswave

#endif  // JCASWAVE_FIM_HPP
