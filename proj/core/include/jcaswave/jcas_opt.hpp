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

#ifndef JCASWAVE_JCAS_OPT_HPP
#define JCASWAVE_JCAS_OPT_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jcaswave/channel.hpp"
#include "jcaswave/individual.hpp"
#include "jcaswave/metrics.hpp"

namespace jcaswave {

/// Real embedding of one complex quadratic form: p_bar^T r_bar p_bar equals
/// Re[p^H R p] exactly, and the eigenvalues of r_bar are those of R, each
/// duplicated. v_r spans the negative direction used by the descent steps.
struct RealifiedProblem {
    Eigen::VectorXd p_bar;  // [Re p; Im p], length 2N
    Eigen::MatrixXd r_bar;  // 2N x 2N symmetric
    Eigen::VectorXd v_r;    // unit eigenvector of the negative eigenvalue
    double r_r = 0.0;       // the negative eigenvalue
};

Eigen::VectorXd realify_vector(const Eigen::VectorXcd& p);
Eigen::VectorXcd unrealify_vector(const Eigen::VectorXd& p_bar);
Eigen::MatrixXd realify_matrix(const Eigen::MatrixXcd& r);
RealifiedProblem realify(const Eigen::VectorXcd& p, const Eigen::MatrixXcd& r);

/// Interpretation of the covariance deviation |Re D + Im D| in the CRB
/// constraint: `determinant` reads |.| as a determinant magnitude (the
/// notation-table reading), `frobenius` as the Frobenius norm.
enum class PsiDprimeMode { determinant, frobenius };

enum class ConstraintKind { mi, crb };

struct JcasParams {
    double rho = 1.0;      // MI-constraint radius per subcarrier
    double xi = 1.0;       // CRB-constraint threshold per subcarrier
    double epsilon = 0.05; // step along the negative eigenvector
    int max_iters = 20000; // sweep cap per subcarrier
    double stall_tol = 1e-9;  // relative -J improvement per sweep
    bool epsilon_halving = true;  // shrink the step when no candidate improves
    bool use_closed_form = true;
    bool record_steps = false;  // keep per-step records in the trace
    PsiDprimeMode psi2_mode = PsiDprimeMode::determinant;

    void validate() const;
};

/// Total power psi(P) = ||P||_F^2.
double constraint_psi(const Eigen::MatrixXcd& p);

/// Squared distance to the MI-optimal precoder, psi'(P) = ||P - P_mi||_F^2.
double constraint_psi_prime(const Eigen::MatrixXcd& p, const Eigen::MatrixXcd& mi_star);

/// Covariance deviation psi''(P) of D = P P^H - q_star, evaluated as
/// |det(Re D + Im D)| or ||Re D + Im D||_F. The transmit covariance is the
/// quantity the CRB depends on, so the deviation is measured there; for
/// Hermitian D the Frobenius mode equals ||D||_F exactly.
double constraint_psi_dprime(const Eigen::MatrixXcd& p, const Eigen::MatrixXcd& q_star,
                             PsiDprimeMode mode);

struct IterationRecord {
    int sweep = 0;
    int column = 0;
    int sign = 0;             // +1 or -1 step direction taken
    char active = '?';        // 'm' MI sphere, 'c' covariance surface, 'p' power
    double scale_coeff = 0.0; // projection coefficient actually applied
    double neg_j = 0.0;       // objective after the accepted move
};

struct SubcarrierTrace {
    std::vector<IterationRecord> records;  // only when record_steps is set
    std::string termination;
    int sweeps = 0;
    std::uint64_t ops = 0;  // scalar operations inside the iteration loop
    bool used_closed_form = false;
    double final_neg_j = 0.0;
    bool start_j_positive = true;
};

struct IterationTrace {
    std::vector<SubcarrierTrace> per_k;

    std::uint64_t total_ops() const;
    int total_sweeps() const;
    std::string termination_summary() const;
};

struct JcasResult {
    PrecoderSet prec;
    IterationTrace trace;
};

class InfeasibleError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Per-column scaled-eigenvector solution when one exists (power surface
/// with the radar constraint slack, or vice versa); nullopt otherwise.
std::optional<PrecoderSet> closed_form_jcas(const CommChannel& comm, const SensingScene& scene,
                                            const ScenarioConfig& config, const JcasParams& params,
                                            ConstraintKind kind);

/// Start point with exactly one active constraint: the column-normalized
/// zero-forcing precoder, blended toward the constraint center until the
/// violated constraint reaches its surface.
PrecoderSet find_initial(const CommChannel& comm, const SensingScene& scene,
                         const ScenarioConfig& config, const JcasParams& params,
                         ConstraintKind kind);

/// MI-constrained joint design: maximizes J subject to ||P||_F^2 <= U and
/// ||P - P_mi||_F^2 <= rho per subcarrier.
JcasResult optimize_mi_constrained(const CommChannel& comm, const SensingScene& scene,
                                   const ScenarioConfig& config, const JcasParams& params);

/// CRB-constrained joint design: maximizes J subject to ||P||_F^2 <= U and
/// psi''(P) <= xi per subcarrier.
JcasResult optimize_crb_constrained(const CommChannel& comm, const SensingScene& scene,
                                    const ScenarioConfig& config, const JcasParams& params);

/// Stationarity diagnostic at the returned point: the angle between the
/// objective gradient 2 R p and the normal of the active constraint surface,
/// per (subcarrier, column). Zero means exact tangency.
struct TangencyReport {
    double max_angle = 0.0;  // radians
    std::vector<std::vector<double>> angle;  // [k][u]
};
TangencyReport kkt_tangency(const CommChannel& comm, const SensingScene& scene,
                            const ScenarioConfig& config, const JcasParams& params,
                            ConstraintKind kind, const PrecoderSet& solution);

}  // namespace jcaswave

#endif  // JCASWAVE_JCAS_OPT_HPP
