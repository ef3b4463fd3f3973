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

#include "jcaswave/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "jcaswave/individual.hpp"
#include "jcaswave/rng.hpp"

namespace jcaswave::oracle {

namespace {

std::complex<double> inner(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    std::complex<double> s{0.0, 0.0};
    for (Eigen::Index i = 0; i < a.size(); ++i) s += std::conj(a(i)) * b(i);
    return s;
}

}  // namespace

double mui_loops(const CommChannel& comm, const PrecoderSet& prec) {
    double total = 0.0;
    for (int k = 0; k < comm.n_subcarriers(); ++k)
        for (int u = 0; u < comm.n_users(); ++u)
            for (int v = 0; v < comm.n_users(); ++v)
                if (v != u) total += std::norm(inner(comm.h[k].col(v), prec.p[k].col(u)));
    return total;
}

double mui_offdiag_frobenius(const CommChannel& comm, const PrecoderSet& prec) {
    double total = 0.0;
    for (int k = 0; k < comm.n_subcarriers(); ++k) {
        Eigen::MatrixXcd cross = comm.h[k].adjoint() * prec.p[k];
        cross.diagonal().setZero();
        total += cross.squaredNorm();
    }
    return total;
}

double ecg_loops(const CommChannel& comm, const PrecoderSet& prec) {
    double total = 0.0;
    for (int k = 0; k < comm.n_subcarriers(); ++k)
        for (int u = 0; u < comm.n_users(); ++u)
            total += std::norm(inner(comm.h[k].col(u), prec.p[k].col(u)));
    return total;
}

double j_loops(const CommChannel& comm, const PrecoderSet& prec, double mu) {
    double total = 0.0;
    for (int k = 0; k < comm.n_subcarriers(); ++k) {
        for (int u = 0; u < comm.n_users(); ++u) {
            const double gain = std::norm(inner(comm.h[k].col(u), prec.p[k].col(u)));
            double interference = 0.0;
            for (int v = 0; v < comm.n_users(); ++v)
                if (v != u) interference += std::norm(inner(comm.h[k].col(v), prec.p[k].col(u)));
            total += gain - mu * interference;
        }
    }
    return total;
}

double mi_determinant(const SensingScene& scene, const PrecoderSet& prec,
                      const ScenarioConfig& config) {
    double total = 0.0;
    const int u_count = prec.n_users();
    for (int k = 0; k < scene.n_subcarriers(); ++k) {
        const Eigen::VectorXcd ph = prec.p[k].adjoint() * scene.h_s[k];
        const Eigen::MatrixXcd m =
            Eigen::MatrixXcd::Identity(u_count, u_count) +
            (config.tx_power / config.noise_var_radar) * (ph * ph.adjoint());
        total += std::log2(std::abs(m.determinant()));
    }
    return total;
}

void GridSpec::validate() const {
    if (dims < 1 || dims > 4)
        throw std::invalid_argument("GridSpec: dims must be between 1 and 4");
    if (!(step > 0.0) || !(hi > lo))
        throw std::invalid_argument("GridSpec: need hi > lo and step > 0");
    if ((hi - lo) / step > 1e4)
        throw std::invalid_argument("GridSpec: more than 1e4 points per dimension");
}

GridSearchResult grid_search_j(const CommChannel& comm, const SensingScene& scene,
                               const ScenarioConfig& config, const JcasParams& params,
                               ConstraintKind kind, const GridSpec& grid) {
    grid.validate();
    if (comm.n_subcarriers() != 1)
        throw std::invalid_argument("grid_search_j: single-subcarrier instances only");
    const int n = comm.n_antennas();
    const int u_count = comm.n_users();
    if (n * u_count != grid.dims)
        throw std::invalid_argument("grid_search_j: dims must equal N*U");

    // Constraint centers mirror the ones the solvers optimize against.
    Eigen::MatrixXcd mi_center;
    Eigen::MatrixXcd q_target;
    if (kind == ConstraintKind::mi) {
        mi_center = opt_mi_precoder(scene, comm, config.mui_weight).prec.p[0];
    } else {
        const CrbCovariance crb = opt_crb_covariance(scene, config);
        q_target = crb.q[0];
    }

    const int steps = int(std::floor((grid.hi - grid.lo) / grid.step + 0.5)) + 1;
    std::vector<int> idx(grid.dims, 0);
    Eigen::MatrixXcd p(n, u_count);

    GridSearchResult out;
    out.best_j = -std::numeric_limits<double>::infinity();
    bool done = false;
    while (!done) {
        for (int d = 0; d < grid.dims; ++d)
            p(d % n, d / n) = grid.lo + grid.step * idx[d];

        if (p.squaredNorm() <= double(u_count)) {
            const bool radar_ok =
                kind == ConstraintKind::mi
                    ? (p - mi_center).squaredNorm() <= params.rho
                    : constraint_psi_dprime(p, q_target, params.psi2_mode) <= params.xi;
            if (radar_ok) {
                ++out.feasible;
                double j = 0.0;
                for (int u = 0; u < u_count; ++u) {
                    const double gain = std::norm(inner(comm.h[0].col(u), p.col(u)));
                    double interference = 0.0;
                    for (int v = 0; v < u_count; ++v)
                        if (v != u) interference += std::norm(inner(comm.h[0].col(v), p.col(u)));
                    j += gain - config.mui_weight * interference;
                }
                if (j > out.best_j) {
                    out.best_j = j;
                    out.best_p = p;
                }
            }
        }

        int d = 0;
        while (d < grid.dims && ++idx[d] == steps) {
            idx[d] = 0;
            ++d;
        }
        done = d == grid.dims;
    }
    if (out.feasible == 0) throw std::runtime_error("grid_search_j: feasible region empty");
    return out;
}

Eigen::MatrixXd numeric_fim(const SensingScene& scene, const PrecoderSet& prec,
                            const ScenarioConfig& config, double h,
                            FimNoiseConvention convention) {
    if (!(h >= 1e-8) || !(h <= 1e-4))
        throw std::invalid_argument("numeric_fim: h must lie in [1e-8, 1e-4]");

    const int l_count = scene.n_targets();
    const int k_count = scene.n_subcarriers();
    const int u_count = prec.n_users();
    const int dim = 4 * l_count;
    const double pref = convention == FimNoiseConvention::paper
                            ? 2.0 / std::sqrt(config.noise_var_radar)
                            : 2.0 / config.noise_var_radar;

    // Stacked means q[k] = P^T A* X* W* 1 rebuilt from raw parameters.
    auto stacked_q = [&](const Eigen::VectorXd& theta) {
        Eigen::VectorXcd q(k_count * u_count);
        for (int i = 0; i < k_count; ++i) {
            const int k = config.subcarrier_index(i);
            Eigen::VectorXcd qk = Eigen::VectorXcd::Zero(u_count);
            for (int l = 0; l < l_count; ++l) {
                const std::complex<double> alpha{theta(l), theta(l_count + l)};
                const double tau = theta(2 * l_count + l);
                const double omega = theta(3 * l_count + l);
                const double arg = 2.0 * M_PI * double(k) * tau / config.symbol_period;
                const std::complex<double> w_conj{std::cos(arg), std::sin(arg)};
                const Eigen::VectorXcd a = array_response(omega, scene.n_antennas());
                qk += std::conj(alpha) * w_conj * (prec.p[i].transpose() * a.conjugate());
            }
            q.segment(i * u_count, u_count) = qk;
        }
        return q;
    };

    Eigen::VectorXd theta(dim);
    for (int l = 0; l < l_count; ++l) {
        theta(l) = scene.targets[l].gain.real();
        theta(l_count + l) = scene.targets[l].gain.imag();
        theta(2 * l_count + l) = scene.targets[l].delay;
        theta(3 * l_count + l) = scene.targets[l].equiv_aod;
    }

    auto fisher_at_step = [&](double step) {
        Eigen::MatrixXcd jac(k_count * u_count, dim);
        for (int i = 0; i < dim; ++i) {
            // Delays live on the symbol-period scale; keep steps relative.
            const double hi = (i >= 2 * l_count && i < 3 * l_count)
                                  ? step * config.symbol_period
                                  : step;
            Eigen::VectorXd tp = theta;
            tp(i) += hi;
            const Eigen::VectorXcd fwd = stacked_q(tp);
            tp(i) -= 2.0 * hi;
            const Eigen::VectorXcd bwd = stacked_q(tp);
            jac.col(i) = (fwd - bwd) / (2.0 * hi);
        }
        return Eigen::MatrixXd(pref * (jac.adjoint() * jac).real());
    };

    const Eigen::MatrixXd f = fisher_at_step(h);
    const Eigen::MatrixXd f_coarse = fisher_at_step(2.0 * h);
    const double scale = std::max(f.norm(), 1e-300);
    if ((f - f_coarse).norm() / scale > 0.1)
        throw std::runtime_error("numeric_fim: step-halving instability (cancellation)");
    return f;
}

DominanceResult random_dominance(const PrecoderSet& candidate, const CommChannel& comm,
                                 const SensingScene& scene, const ScenarioConfig& config,
                                 DominanceMetric metric, int trials, std::uint64_t seed) {
    if (trials < 1000) throw std::invalid_argument("random_dominance: need at least 1e3 trials");

    const double candidate_value =
        metric == DominanceMetric::j_bound ? j_loops(comm, candidate, config.mui_weight)
                                           : mi_determinant(scene, candidate, config);

    const int n = candidate.n_antennas();
    const int u_count = candidate.n_users();
    const int k_count = candidate.n_subcarriers();

    DominanceResult out;
    out.trials = trials;
    out.worst_gap = std::numeric_limits<double>::infinity();
    PrecoderSet sample;
    sample.p.assign(k_count, Eigen::MatrixXcd(n, u_count));
    for (int t = 0; t < trials; ++t) {
        for (int k = 0; k < k_count; ++k) {
            for (int u = 0; u < u_count; ++u) {
                StreamRng rng(seed, std::uint64_t(t) + 1, std::uint64_t(k) * u_count + u);
                Eigen::VectorXcd col(n);
                for (int i = 0; i < n; ++i) col(i) = rng.complex_gaussian();
                sample.p[k].col(u) = col / col.norm();
            }
        }
        const double value = metric == DominanceMetric::j_bound
                                 ? j_loops(comm, sample, config.mui_weight)
                                 : mi_determinant(scene, sample, config);
        out.worst_gap = std::min(out.worst_gap, candidate_value - value);
    }
    out.pass = out.worst_gap >= -1e-9;
    return out;
}

}  // namespace jcaswave::oracle
