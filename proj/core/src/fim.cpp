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

#include "jcaswave/fim.hpp"

#include <cmath>
#include <limits>

namespace jcaswave {

namespace {

double fim_prefactor(const ScenarioConfig& config, FimNoiseConvention convention) {
    return convention == FimNoiseConvention::paper
               ? 2.0 / std::sqrt(config.noise_var_radar)
               : 2.0 / config.noise_var_radar;
}

}  // namespace

FimReport fim(const SensingScene& scene, const PrecoderSet& prec,
              const ScenarioConfig& config, FimNoiseConvention convention) {
    if (scene.n_subcarriers() != prec.n_subcarriers() ||
        scene.n_antennas() != prec.n_antennas())
        throw std::invalid_argument("fim: scene/precoder shape mismatch");

    const int l_count = scene.n_targets();
    const int k_count = scene.n_subcarriers();
    const double pref = fim_prefactor(config, convention);

    // Steering derivative matrix; columns match the targets of A.
    Eigen::MatrixXcd steering_dot(scene.n_antennas(), l_count);
    for (int l = 0; l < l_count; ++l)
        steering_dot.col(l) = steering_derivative(scene.targets[l].equiv_aod, scene.n_antennas());

    // Gain outer product conj(alpha) alpha^T; sandwiching a matrix between
    // diag(alpha)^H and diag(alpha) equals a Hadamard product with it.
    const Eigen::MatrixXcd gain_outer = scene.gains.conjugate() * scene.gains.transpose();
    const Eigen::MatrixXcd gain_diag = scene.gains.asDiagonal();

    FimReport out;
    out.f1 = Eigen::MatrixXcd::Zero(l_count, l_count);
    out.f2 = out.f1;
    out.f3 = out.f1;
    out.f4 = out.f1;
    out.f5 = out.f1;
    out.f6 = out.f1;
    out.f4_f1_ratio.reserve(k_count);

    for (int i = 0; i < k_count; ++i) {
        const int k = config.subcarrier_index(i);
        const double wdot_rate = 2.0 * M_PI * double(k) / config.symbol_period;

        const Eigen::MatrixXcd cov = prec.p[i] * prec.p[i].adjoint();  // P P^H
        const Eigen::MatrixXcd m_aa = scene.steering.adjoint() * cov * scene.steering;
        const Eigen::MatrixXcd m_ad = scene.steering.adjoint() * cov * steering_dot;
        const Eigen::MatrixXcd m_dd = steering_dot.adjoint() * cov * steering_dot;

        const Eigen::VectorXcd w = scene.phase[i];
        const Eigen::MatrixXcd w_diag = w.asDiagonal();
        // Wdot = (-j 2 pi k / T) W; the j cancels in every sandwich below,
        // leaving real rate factors.
        const Eigen::MatrixXcd f1_k = w_diag.adjoint() * m_aa * w_diag;
        const Eigen::MatrixXcd f2_k =
            std::complex<double>(0.0, -wdot_rate) * (w_diag.adjoint() * (m_aa * gain_diag) * w_diag);
        const Eigen::MatrixXcd f3_k = w_diag.adjoint() * (m_ad * gain_diag) * w_diag;
        const Eigen::MatrixXcd f4_k =
            wdot_rate * wdot_rate * (w_diag.adjoint() * m_aa.cwiseProduct(gain_outer) * w_diag);
        const Eigen::MatrixXcd f5_k =
            std::complex<double>(0.0, wdot_rate) * (w_diag.adjoint() * m_ad.cwiseProduct(gain_outer) * w_diag);
        const Eigen::MatrixXcd f6_k = w_diag.adjoint() * m_dd.cwiseProduct(gain_outer) * w_diag;

        out.f1 += pref * f1_k;
        out.f2 += pref * f2_k;
        out.f3 += pref * f3_k;
        out.f4 += pref * f4_k;
        out.f5 += pref * f5_k;
        out.f6 += pref * f6_k;

        const double f1_norm = f1_k.norm();
        out.f4_f1_ratio.push_back(f1_norm > 0.0 ? f4_k.norm() / f1_norm : 0.0);
    }

    Eigen::MatrixXd f(4 * l_count, 4 * l_count);
    const auto re = [](const Eigen::MatrixXcd& m) { return m.real(); };
    const auto im = [](const Eigen::MatrixXcd& m) { return m.imag(); };
    const int l = l_count;
    f.block(0 * l, 0 * l, l, l) = re(out.f1);
    f.block(0 * l, 1 * l, l, l) = -im(out.f1);
    f.block(0 * l, 2 * l, l, l) = re(out.f2);
    f.block(0 * l, 3 * l, l, l) = re(out.f3);
    f.block(1 * l, 0 * l, l, l) = im(out.f1);
    f.block(1 * l, 1 * l, l, l) = re(out.f1);
    f.block(1 * l, 2 * l, l, l) = im(out.f2);
    f.block(1 * l, 3 * l, l, l) = im(out.f3);
    f.block(2 * l, 0 * l, l, l) = re(out.f2).transpose();
    f.block(2 * l, 1 * l, l, l) = im(out.f2).transpose();
    f.block(2 * l, 2 * l, l, l) = re(out.f4);
    f.block(2 * l, 3 * l, l, l) = re(out.f5);
    f.block(3 * l, 0 * l, l, l) = re(out.f3).transpose();
    f.block(3 * l, 1 * l, l, l) = im(out.f3).transpose();
    f.block(3 * l, 2 * l, l, l) = re(out.f5).transpose();
    f.block(3 * l, 3 * l, l, l) = re(out.f6);
    out.fim = std::move(f);

    // Symmetric-aware inverse with a condition-number guard. Gains, delays
    // and angles carry wildly different units, so the guard is evaluated on
    // the Jacobi-equilibrated matrix D^-1/2 F D^-1/2 (unit-invariant); it
    // trips for genuinely degenerate scenes such as coincident targets, not
    // for benign scale disparity. The inverse is computed through the same
    // equilibrated system.
    const Eigen::VectorXd diag = out.fim.diagonal();
    if (diag.minCoeff() > 0.0) {
        const Eigen::VectorXd dis = diag.cwiseSqrt().cwiseInverse();
        const Eigen::MatrixXd equilibrated =
            dis.asDiagonal() * out.fim * dis.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(equilibrated);
        const Eigen::VectorXd eig = es.eigenvalues();
        const double abs_max = eig.cwiseAbs().maxCoeff();
        const double abs_min = eig.cwiseAbs().minCoeff();
        out.condition =
            abs_min > 0.0 ? abs_max / abs_min : std::numeric_limits<double>::infinity();
        if (std::isfinite(out.condition) && out.condition <= 1e12 && eig.minCoeff() > 0.0) {
            const Eigen::MatrixXd inv_equilibrated = es.eigenvectors() *
                                                     eig.cwiseInverse().asDiagonal() *
                                                     es.eigenvectors().transpose();
            out.crb = dis.asDiagonal() * inv_equilibrated * dis.asDiagonal();
            out.crb_total_value = out.crb.norm();
            out.crb_valid = true;
        }
    } else {
        out.condition = std::numeric_limits<double>::infinity();
    }
    return out;
}

double crb_total(const FimReport& report) {
    if (!report.crb_valid)
        throw SingularFimError("crb_total: FIM singular or ill-conditioned (condition " +
                               std::to_string(report.condition) + ")");
    return report.crb_total_value;
}

}  // namespace jcaswave
