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

#ifndef JCASWAVE_INDIVIDUAL_HPP
#define JCASWAVE_INDIVIDUAL_HPP

#include <vector>

#include <Eigen/Dense>

#include "jcaswave/channel.hpp"
#include "jcaswave/fim.hpp"
#include "jcaswave/metrics.hpp"

namespace jcaswave {

/// Communication-only precoder: each column is the unit eigenvector of the
/// negative eigenvalue of R_u[k], so every subcarrier maximizes the
/// regulated bound J under equal per-column power.
/// Throws std::runtime_error when some R_u[k] has no negative eigenvalue.
PrecoderSet opt_comm_precoder(const CommChannel& comm, double mu);

/// Row gain of the rank-one MI precoder P[k] = h_s[k] * Lambda[k] with
/// ||Lambda||_F^2 = U / ||h_s||_F^2.
struct MiPrecoderGain {
    Eigen::RowVectorXcd lambda;  // 1 x U
    double scale = 0.0;          // c in lambda_u = c ||R_u h_s||_F
};

struct MiPrecoderResult {
    PrecoderSet prec;
    std::vector<MiPrecoderGain> gain;  // per subcarrier
};

/// Sensing-MI-optimal precoder; rank one per subcarrier, aligned with the
/// sensing channel, with the gain row chosen to maximize the magnitude of
/// the J gradient. Throws on a zero sensing channel.
MiPrecoderResult opt_mi_precoder(const SensingScene& scene, const CommChannel& comm, double mu);

/// Waveform covariances maximizing the smallest eigenvalue of the dominant
/// (delay) FIM block under Q >= 0, tr(Q) <= U.
struct CrbCovariance {
    std::vector<Eigen::MatrixXcd> q;  // per subcarrier, N x N Hermitian PSD
    std::vector<double> t;            // attained min-eigenvalue objective
    bool converged = false;
    int iterations = 0;
};

struct CrbCovarianceOptions {
    bool per_k = true;  // one independent problem per subcarrier, else one shared Q
    int max_iters = 5000;
    double improve_tol = 1e-8;  // convergence: objective gain over the window
    int stall_window = 50;
    FimNoiseConvention convention = FimNoiseConvention::paper;
};

/// Projected supergradient ascent on lambda_min(Re F4(Q)); iterates stay
/// feasible (PSD-cone clip then trace rescale) and the accepted objective is
/// non-decreasing. A structurally zero objective (no gain or k = 0) returns
/// a feasible Q with t = 0.
CrbCovariance opt_crb_covariance(const SensingScene& scene, const ScenarioConfig& config,
                                 const CrbCovarianceOptions& options = {});

/// Rank-U factor of a covariance: columns are the top eigenvectors scaled by
/// sqrt of their eigenvalues, phases fixed deterministically.
Eigen::MatrixXcd covariance_factor(const Eigen::MatrixXcd& q, int n_users);

/// Rotates a vector so its first significant entry is real positive.
Eigen::VectorXcd phase_fixed(Eigen::VectorXcd v);

}  // namespace jcaswave

#endif  // JCASWAVE_INDIVIDUAL_HPP
