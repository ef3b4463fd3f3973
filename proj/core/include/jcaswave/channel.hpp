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

#ifndef JCASWAVE_CHANNEL_HPP
#define JCASWAVE_CHANNEL_HPP

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jcaswave/scenario.hpp"

namespace jcaswave {

/// One propagation path between the base station and a user.
struct CommPath {
    std::complex<double> gain;  // beta
    double equiv_aod = 0.0;     // Omega = pi*sin(aod), in [-pi, pi)
    double delay = 0.0;         // tau [s], in [0, cp_length]
};

/// One sensing target, parameterized exactly like a path.
struct Target {
    std::complex<double> gain;  // alpha
    double equiv_aod = 0.0;     // Omega = pi*sin(aod)
    double delay = 0.0;         // tau [s]
};

/// Frequency-domain downlink channels of all users.
///
/// h[i] is the N x U matrix whose column u is the user-u channel on the
/// i-th subcarrier. Columns obey the per-path sum
///   h_u[k] = sum_l beta_l a(Omega_l) exp(-j 2 pi k tau_l / T).
struct CommChannel {
    std::vector<std::vector<CommPath>> paths;  // [user][path]
    std::vector<Eigen::MatrixXcd> h;           // K matrices, N x U

    int n_antennas() const { return h.empty() ? 0 : int(h.front().rows()); }
    int n_users() const { return h.empty() ? 0 : int(h.front().cols()); }
    int n_subcarriers() const { return int(h.size()); }
};

/// Factorized sensing channel h_s[k] = A X W[k] 1.
///
/// A holds the steering vectors of the targets, X = diag(gains) and W[k] the
/// per-subcarrier delay phases. Construction checks that the factorized form
/// matches the direct per-target summation to 1e-12 relative.
struct SensingScene {
    std::vector<Target> targets;
    Eigen::MatrixXcd steering;                // A, N x L
    Eigen::VectorXcd gains;                   // diagonal of X, length L
    std::vector<Eigen::VectorXcd> phase;      // diagonal of W[k], length L, per k
    std::vector<Eigen::VectorXcd> h_s;        // K vectors, length N

    int n_antennas() const { return int(steering.rows()); }
    int n_targets() const { return int(steering.cols()); }
    int n_subcarriers() const { return int(h_s.size()); }
};

/// Normalized ULA response a(Omega), entries exp(j n Omega)/sqrt(N).
Eigen::VectorXcd array_response(double equiv_aod, int n_antennas);

/// d a(Omega) / d Omega, entries j n exp(j n Omega)/sqrt(N).
Eigen::VectorXcd steering_derivative(double equiv_aod, int n_antennas);

/// Builds the per-subcarrier channel matrices from explicit path lists.
/// Rejects delays outside [0, cp_length] and wrong path counts.
CommChannel synth_comm_channel(const ScenarioConfig& config,
                               const std::vector<std::vector<CommPath>>& paths);

/// Builds steering/gain/phase factors and the sensing channel vectors.
/// Rejects an empty target list and out-of-range delays.
SensingScene synth_sensing_scene(const ScenarioConfig& config,
                                 const std::vector<Target>& targets);

/// Draws a random scenario: AoDs uniform on [-pi, pi), delays uniform on
/// [0, cp_length], gains CN(0, 1). Deterministic per (seed, entity, index).
std::pair<CommChannel, SensingScene> draw_scenario(const ScenarioConfig& config);

}  // namespace jcaswave

#endif  // JCASWAVE_CHANNEL_HPP
