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

#ifndef JCASWAVE_ORACLE_HPP
#define JCASWAVE_ORACLE_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "jcaswave/channel.hpp"
#include "jcaswave/fim.hpp"
#include "jcaswave/jcas_opt.hpp"
#include "jcaswave/metrics.hpp"

// Brute-force reference implementations. These deliberately avoid the main
// metric code paths (plain scalar loops, determinant instead of scalar MI
// form, finite differences instead of analytic derivatives) so agreement is
// evidence, not tautology.
namespace jcaswave::oracle {

/// Eq-independent MUI: explicit triple loop over (k, u, v != u).
double mui_loops(const CommChannel& comm, const PrecoderSet& prec);

/// Off-diagonal Frobenius route ||H^H P - diag(H^H P)||_F^2 summed over k.
double mui_offdiag_frobenius(const CommChannel& comm, const PrecoderSet& prec);

/// Explicit per-entry effective channel gain.
double ecg_loops(const CommChannel& comm, const PrecoderSet& prec);

/// Regulated bound via scalar loops, J = sum (S - mu I).
double j_loops(const CommChannel& comm, const PrecoderSet& prec, double mu);

/// Sensing MI via the determinant form log2 |I_U + (P/sigma^2) P^H h h^H P|.
double mi_determinant(const SensingScene& scene, const PrecoderSet& prec,
                      const ScenarioConfig& config);

/// Exhaustive grid search over real-valued precoders (imaginary parts zero).
struct GridSpec {
    int dims = 0;       // number of real parameters, N*U, at most 4
    double lo = -1.0;
    double hi = 1.0;
    double step = 1e-3;

    void validate() const;  // enforces dims <= 4 and <= 1e4 points per dim
};

struct GridSearchResult {
    double best_j = 0.0;
    Eigen::MatrixXcd best_p;     // N x U
    std::uint64_t feasible = 0;  // feasible grid points visited
};

/// Maximizes J over the feasible set {psi <= U, radar constraint <= bound}
/// on one subcarrier, enumerating a real grid. Throws when no grid point is
/// feasible or the grid is too large.
GridSearchResult grid_search_j(const CommChannel& comm, const SensingScene& scene,
                               const ScenarioConfig& config, const JcasParams& params,
                               ConstraintKind kind, const GridSpec& grid);

/// Central-difference Fisher information of the stacked means
/// q[k] = P^T A* X* W* 1 with respect to [Re alpha, Im alpha, tau, Omega].
/// Steps are scaled per parameter family (delays by the symbol period).
/// Throws when halving the step moves the result by more than 10%
/// (cancellation) or h is outside [1e-8, 1e-4].
Eigen::MatrixXd numeric_fim(const SensingScene& scene, const PrecoderSet& prec,
                            const ScenarioConfig& config, double h = 1e-6,
                            FimNoiseConvention convention = FimNoiseConvention::paper);

enum class DominanceMetric { j_bound, sensing_mi };

struct DominanceResult {
    bool pass = false;
    double worst_gap = 0.0;  // most negative candidate-minus-sample margin
    int trials = 0;
};

/// Samples unit-power-column precoders (normalized complex Gaussian
/// directions) and checks metric(candidate) >= metric(sample) - 1e-9.
DominanceResult random_dominance(const PrecoderSet& candidate, const CommChannel& comm,
                                 const SensingScene& scene, const ScenarioConfig& config,
                                 DominanceMetric metric, int trials, std::uint64_t seed);

}  // namespace jcaswave::oracle

#endif  // JCASWAVE_ORACLE_HPP
