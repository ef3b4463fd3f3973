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

#ifndef JCASWAVE_METRICS_HPP
#define JCASWAVE_METRICS_HPP

#include <vector>

#include <Eigen/Dense>

#include "jcaswave/channel.hpp"
#include "jcaswave/scenario.hpp"

namespace jcaswave {

/// Per-subcarrier N x U precoders under the total power budget
/// ||P[k]||_F^2 <= U.
struct PrecoderSet {
    std::vector<Eigen::MatrixXcd> p;  // K matrices, N x U

    int n_antennas() const { return p.empty() ? 0 : int(p.front().rows()); }
    int n_users() const { return p.empty() ? 0 : int(p.front().cols()); }
    int n_subcarriers() const { return int(p.size()); }

    /// Throws std::invalid_argument when a subcarrier exceeds the power
    /// budget by more than tol.
    void check_power(double tol = 1e-9) const;
};

/// Pseudo-inverse (zero-forcing) precoder with unit-norm columns; nulls all
/// cross-user terms when N >= U and the channel has full column rank.
PrecoderSet zero_forcing_precoder(const CommChannel& comm);

/// A per-(subcarrier, user) metric with its scalar total.
struct MetricField {
    Eigen::MatrixXd per;  // K x U
    double total = 0.0;
};

/// Multi-user interference I_{k,u} = sum_{v != u} |h_v[k]^H p_u[k]|^2.
MetricField mui(const CommChannel& comm, const PrecoderSet& prec);

/// Effective channel gain S_{k,u} = |h_u[k]^H p_u[k]|^2.
MetricField ecg(const CommChannel& comm, const PrecoderSet& prec);

/// Per-(k,u) quadratic-form matrices R_u[k] = mu Ht_u Ht_u^H - h_u h_u^H,
/// where Ht_u stacks the other users' channels. Hermitian with at most one
/// negative eigenvalue; the regulated bound is J = -sum p^H R p.
using RuSet = std::vector<std::vector<Eigen::MatrixXcd>>;  // [k][u], N x N
RuSet build_ru(const CommChannel& comm, double mu);

/// Regulated SINR lower bound J = ECG - mu * MUI.
double j_metric(const CommChannel& comm, const PrecoderSet& prec, double mu);

/// Same metric through the quadratic route -sum_k sum_u p^H R p; the two
/// routes agree to 1e-10 and the tests pin that identity.
double j_metric_quadratic(const RuSet& ru, const PrecoderSet& prec);

struct SinrReport {
    Eigen::MatrixXd sinr;   // K x U
    double sum_rate = 0.0;  // bits per channel use, sum of log2(1 + SINR)
};

/// SINR_{k,u} = (P S / U) / (P I / U + sigma_1^2) and the resulting sum rate.
SinrReport sinr_and_rate(const CommChannel& comm, const PrecoderSet& prec,
                         const ScenarioConfig& config);

/// Sensing mutual information in bits:
///   MI = sum_k log2(1 + P h_s[k]^H P[k] P[k]^H h_s[k] / sigma^2).
double sensing_mi(const SensingScene& scene, const PrecoderSet& prec,
                  const ScenarioConfig& config);

/// Side conditions under which J lower-bounds the SINR sum:
/// I_{k,u} + U sigma_1^2 / P <= 1 and S_{k,u} > mu I_{k,u} for all (k,u).
struct SideConditions {
    bool all_hold = false;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> noise_margin;  // cond 1
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> gain_dominance;  // cond 2
};
SideConditions sinr_bound_conditions(const CommChannel& comm, const PrecoderSet& prec,
                                     const ScenarioConfig& config);

}  // namespace jcaswave

#endif  // JCASWAVE_METRICS_HPP
