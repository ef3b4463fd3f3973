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

#include "jcaswave/individual.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "jcaswave/rng.hpp"

namespace jcaswave {

Eigen::VectorXcd phase_fixed(Eigen::VectorXcd v) {
    const double norm = v.norm();
    if (!(norm > 0.0)) return v;
    for (int i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > 1e-12 * norm) {
            v *= std::conj(v(i)) / mag;
            break;
        }
    }
    return v;
}

PrecoderSet opt_comm_precoder(const CommChannel& comm, double mu) {
    const RuSet ru = build_ru(comm, mu);
    PrecoderSet out;
    out.p.reserve(ru.size());
    for (std::size_t k = 0; k < ru.size(); ++k) {
        Eigen::MatrixXcd pk(comm.n_antennas(), comm.n_users());
        for (std::size_t u = 0; u < ru[k].size(); ++u) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ru[k][u]);
            if (!(es.eigenvalues()(0) < 0.0))
                throw std::runtime_error("opt_comm_precoder: R_u has no negative eigenvalue "
                                         "(degenerate channel) at subcarrier " + std::to_string(k));
            pk.col(int(u)) = phase_fixed(es.eigenvectors().col(0));
        }
        out.p.push_back(std::move(pk));
    }
    return out;
}

MiPrecoderResult opt_mi_precoder(const SensingScene& scene, const CommChannel& comm, double mu) {
    if (scene.n_subcarriers() != comm.n_subcarriers() || scene.n_antennas() != comm.n_antennas())
        throw std::invalid_argument("opt_mi_precoder: scene/channel shape mismatch");
    const RuSet ru = build_ru(comm, mu);
    const int u_count = comm.n_users();

    MiPrecoderResult out;
    out.prec.p.reserve(scene.n_subcarriers());
    out.gain.reserve(scene.n_subcarriers());
    for (int k = 0; k < scene.n_subcarriers(); ++k) {
        const Eigen::VectorXcd& hs = scene.h_s[k];
        const double hs_norm2 = hs.squaredNorm();
        if (!(hs_norm2 > 0.0))
            throw std::runtime_error("opt_mi_precoder: zero sensing channel at subcarrier " +
                                     std::to_string(k));

        Eigen::RowVectorXd raw(u_count);
        for (int u = 0; u < u_count; ++u) raw(u) = (ru[k][u] * hs).norm();
        if (!(raw.norm() > 0.0)) raw.setOnes();  // gradient vanishes; fall back to a uniform row

        const double c = std::sqrt(double(u_count) / hs_norm2) / raw.norm();
        MiPrecoderGain gain;
        gain.scale = c;
        gain.lambda = (c * raw).cast<std::complex<double>>();
        out.prec.p.push_back(hs * gain.lambda);
        out.gain.push_back(std::move(gain));
    }
    return out;
}

namespace {

// Per-subcarrier data of the delay-block objective lambda_min(Re F4(Q)).
struct DelayBlockTerm {
    double kappa = 0.0;           // prefactor * (2 pi k / T)^2
    Eigen::MatrixXcd gain_outer;  // conj(alpha) alpha^T
    Eigen::VectorXcd w;           // W[k] diagonal
};

Eigen::MatrixXd delay_block(const DelayBlockTerm& term, const Eigen::MatrixXcd& steering,
                            const Eigen::MatrixXcd& q) {
    const Eigen::MatrixXcd m = steering.adjoint() * q * steering;
    const Eigen::MatrixXcd inner = m.cwiseProduct(term.gain_outer);
    const Eigen::MatrixXcd f4 =
        term.kappa * (term.w.conjugate().asDiagonal() * inner * term.w.asDiagonal());
    return f4.real();
}

// Hermitian G with d/dQ [ v^T Re F4(Q) v ] = tr(Q G), for a real unit v.
Eigen::MatrixXcd delay_block_supergradient(const DelayBlockTerm& term,
                                           const Eigen::MatrixXcd& steering,
                                           const Eigen::VectorXd& v) {
    const Eigen::VectorXcd w = term.w.cwiseProduct(v.cast<std::complex<double>>());
    const Eigen::MatrixXcd t = term.gain_outer.cwiseProduct(w.conjugate() * w.transpose());
    return term.kappa * (steering * t.conjugate() * steering.adjoint());
}

Eigen::MatrixXcd project_feasible(Eigen::MatrixXcd q, double trace_budget) {
    // PSD-cone clip, then trace rescale; both preserve positive semidefiniteness.
    q = 0.5 * (q + q.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(q);
    Eigen::VectorXd eig = es.eigenvalues().cwiseMax(0.0);
    q = es.eigenvectors() * eig.asDiagonal() * es.eigenvectors().adjoint();
    const double tr = q.real().trace();
    if (tr > trace_budget && tr > 0.0) q *= trace_budget / tr;
    return q;
}

struct AscentResult {
    Eigen::MatrixXcd q;
    double t = 0.0;
    bool converged = false;
    int iterations = 0;
};

AscentResult ascend(const std::vector<DelayBlockTerm>& terms, const Eigen::MatrixXcd& steering,
                    int n_users, const CrbCovarianceOptions& options) {
    const int n = int(steering.rows());
    const double budget = double(n_users);

    double total_kappa = 0.0;
    double total_gain = 0.0;
    for (const auto& term : terms) {
        total_kappa += term.kappa;
        total_gain += term.gain_outer.norm();
    }

    AscentResult out;
    out.q = (budget / double(n)) * Eigen::MatrixXcd::Identity(n, n);
    if (total_kappa == 0.0 || total_gain == 0.0) {
        // Objective is identically zero (k = 0 term or zero-gain targets).
        out.t = 0.0;
        out.converged = true;
        return out;
    }

    struct Spectrum {
        Eigen::VectorXd eig;
        Eigen::MatrixXd vec;
    };
    auto spectrum = [&](const Eigen::MatrixXcd& q) {
        Eigen::MatrixXd f4 = Eigen::MatrixXd::Zero(int(terms.front().gain_outer.rows()),
                                                   int(terms.front().gain_outer.cols()));
        for (const auto& term : terms) f4 += delay_block(term, steering, q);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f4);
        return Spectrum{es.eigenvalues(), es.eigenvectors()};
    };

    // Deterministic multi-start: identity split, steering-aligned, and a
    // seeded batch of random trace-budget covariances.
    {
        std::vector<Eigen::MatrixXcd> starts;
        starts.push_back(out.q);
        Eigen::MatrixXcd aligned = steering * steering.adjoint();
        aligned *= budget / aligned.real().trace();
        starts.push_back(aligned);
        for (int t = 0; t < 256; ++t) {
            StreamRng rng(0xC0FFEEULL, 11, t);
            Eigen::MatrixXcd b(n, n);
            for (int i = 0; i < b.size(); ++i) b.data()[i] = rng.complex_gaussian();
            Eigen::MatrixXcd q = b * b.adjoint();
            q *= budget / q.real().trace();
            starts.push_back(std::move(q));
        }
        out.t = -std::numeric_limits<double>::infinity();
        for (const auto& q : starts) {
            const double t_q = spectrum(q).eig(0);
            if (t_q > out.t) {
                out.t = t_q;
                out.q = q;
            }
        }
    }

    // lambda_min is concave but nonsmooth where eigenvalues cross (the
    // generic situation at a max-min optimum), so the ascent direction mixes
    // the supergradients of all near-minimal eigenvectors with softmin
    // weights. Steps are accepted only on strict improvement of the exact
    // objective, keeping the iterate sequence monotone.
    Spectrum spec = spectrum(out.q);
    double window_base = out.t;
    double step = 0.25;
    for (int it = 0; it < options.max_iters; ++it) {
        out.iterations = it + 1;

        const double scale = std::max(spec.eig.cwiseAbs().maxCoeff(), 1e-300);
        const double tau = 1e-3 * scale;
        Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
        double weight_sum = 0.0;
        for (int i = 0; i < spec.eig.size(); ++i) {
            const double w = std::exp(-(spec.eig(i) - spec.eig(0)) / tau);
            if (w < 1e-12) continue;
            Eigen::MatrixXcd gi = Eigen::MatrixXcd::Zero(n, n);
            for (const auto& term : terms)
                gi += delay_block_supergradient(term, steering, spec.vec.col(i));
            g += w * gi;
            weight_sum += w;
        }
        if (!(weight_sum > 0.0)) break;
        g /= weight_sum;
        const double g_norm = g.norm();
        if (!(g_norm > 0.0)) break;

        const Eigen::MatrixXcd trial =
            project_feasible(out.q + (step * budget / g_norm) * g, budget);
        const Spectrum trial_spec = spectrum(trial);
        if (trial_spec.eig(0) > out.t) {
            out.q = trial;
            out.t = trial_spec.eig(0);
            spec = trial_spec;
            step = std::min(step * 1.25, 4.0);
        } else {
            step *= 0.5;
            if (step < 1e-14) break;
        }

        if ((it + 1) % options.stall_window == 0) {
            if (out.t - window_base < options.improve_tol) {
                out.converged = true;
                break;
            }
            window_base = out.t;
        }
    }
    if (out.iterations < options.max_iters && !out.converged) out.converged = true;

    // Canonical representative: the real part of a feasible Q is feasible,
    // and for real problem data it attains the same objective. Ties resolve
    // toward it so real scenes get real covariances.
    {
        const Eigen::MatrixXcd q_re = out.q.real().cast<std::complex<double>>();
        const double t_re = spectrum(q_re).eig(0);
        if (t_re >= out.t - 1e-12 * std::max(1.0, std::abs(out.t))) {
            out.q = q_re;
            out.t = t_re;
        }
    }
    return out;
}

}  // namespace

CrbCovariance opt_crb_covariance(const SensingScene& scene, const ScenarioConfig& config,
                                 const CrbCovarianceOptions& options) {
    const int k_count = scene.n_subcarriers();
    const double pref = options.convention == FimNoiseConvention::paper
                            ? 2.0 / std::sqrt(config.noise_var_radar)
                            : 2.0 / config.noise_var_radar;
    const Eigen::MatrixXcd gain_outer = scene.gains.conjugate() * scene.gains.transpose();

    std::vector<DelayBlockTerm> terms(k_count);
    for (int i = 0; i < k_count; ++i) {
        const double rate = 2.0 * M_PI * double(config.subcarrier_index(i)) / config.symbol_period;
        terms[i] = {pref * rate * rate, gain_outer, scene.phase[i]};
    }

    CrbCovariance out;
    out.q.reserve(k_count);
    out.t.reserve(k_count);
    out.converged = true;
    if (options.per_k) {
        for (int i = 0; i < k_count; ++i) {
            const AscentResult res =
                ascend({terms[i]}, scene.steering, config.n_users, options);
            out.q.push_back(res.q);
            out.t.push_back(res.t);
            out.converged = out.converged && res.converged;
            out.iterations += res.iterations;
        }
    } else {
        const AscentResult res = ascend(terms, scene.steering, config.n_users, options);
        for (int i = 0; i < k_count; ++i) {
            out.q.push_back(res.q);
            out.t.push_back(res.t);
        }
        out.converged = res.converged;
        out.iterations = res.iterations;
    }
    return out;
}

Eigen::MatrixXcd covariance_factor(const Eigen::MatrixXcd& q, int n_users) {
    if (q.rows() != q.cols()) throw std::invalid_argument("covariance_factor: square matrix required");
    if (n_users < 1 || n_users > q.rows())
        throw std::invalid_argument("covariance_factor: invalid user count");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(q);
    Eigen::MatrixXcd factor(q.rows(), n_users);
    // Eigenvalues ascend; take the top n_users in descending order.
    for (int i = 0; i < n_users; ++i) {
        const int src = int(q.rows()) - 1 - i;
        const double lambda = std::max(es.eigenvalues()(src), 0.0);
        factor.col(i) = phase_fixed(es.eigenvectors().col(src)) * std::sqrt(lambda);
    }
    return factor;
}

}  // namespace jcaswave
