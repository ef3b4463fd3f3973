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

#include "jcaswave/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "jcaswave/numeric.hpp"

namespace jcaswave {

namespace {

void check_shapes(const CommChannel& comm, const PrecoderSet& prec, const char* what) {
    if (comm.n_subcarriers() != prec.n_subcarriers() ||
        comm.n_antennas() != prec.n_antennas() ||
        comm.n_users() != prec.n_users())
        throw std::invalid_argument(std::string(what) + ": channel/precoder shape mismatch");
}

}  // namespace

void PrecoderSet::check_power(double tol) const {
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double budget = double(p[i].cols());
        if (p[i].squaredNorm() > budget + tol)
            throw std::invalid_argument("PrecoderSet: power budget exceeded on subcarrier " +
                                        std::to_string(i));
    }
}

PrecoderSet zero_forcing_precoder(const CommChannel& comm) {
    PrecoderSet out;
    out.p.reserve(comm.h.size());
    for (const auto& hk : comm.h) {
        // Pseudo-inverse of H^H is H (H^H H)^{-1}; columns then normalized
        // so the set sits exactly on the power budget.
        Eigen::MatrixXcd gram = hk.adjoint() * hk;
        Eigen::MatrixXcd zf = hk * gram.inverse();
        for (int u = 0; u < zf.cols(); ++u) {
            const double norm = zf.col(u).norm();
            if (!(norm > 0.0) || !std::isfinite(norm))
                throw std::runtime_error("zero_forcing_precoder: rank-deficient channel");
            zf.col(u) /= norm;
        }
        out.p.push_back(std::move(zf));
    }
    return out;
}

MetricField mui(const CommChannel& comm, const PrecoderSet& prec) {
    check_shapes(comm, prec, "mui");
    const int k_count = comm.n_subcarriers();
    const int u_count = comm.n_users();

    MetricField out;
    out.per.resize(k_count, u_count);
    KahanSum total;
    for (int k = 0; k < k_count; ++k) {
        const Eigen::MatrixXcd cross = comm.h[k].adjoint() * prec.p[k];  // U x U, (v,u) = h_v^H p_u
        for (int u = 0; u < u_count; ++u) {
            double s = 0.0;
            for (int v = 0; v < u_count; ++v)
                if (v != u) s += std::norm(cross(v, u));
            out.per(k, u) = s;
            total.add(s);
        }
    }
    out.total = total.value();
    return out;
}

MetricField ecg(const CommChannel& comm, const PrecoderSet& prec) {
    check_shapes(comm, prec, "ecg");
    const int k_count = comm.n_subcarriers();
    const int u_count = comm.n_users();

    MetricField out;
    out.per.resize(k_count, u_count);
    KahanSum total;
    for (int k = 0; k < k_count; ++k) {
        for (int u = 0; u < u_count; ++u) {
            const double s = std::norm(comm.h[k].col(u).dot(prec.p[k].col(u)));
            out.per(k, u) = s;
            total.add(s);
        }
    }
    out.total = total.value();
    return out;
}

RuSet build_ru(const CommChannel& comm, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("build_ru: mu must be positive");
    const int k_count = comm.n_subcarriers();
    const int u_count = comm.n_users();

    RuSet out(k_count);
    for (int k = 0; k < k_count; ++k) {
        out[k].reserve(u_count);
        for (int u = 0; u < u_count; ++u) {
            Eigen::MatrixXcd r = -comm.h[k].col(u) * comm.h[k].col(u).adjoint();
            for (int v = 0; v < u_count; ++v)
                if (v != u) r += mu * comm.h[k].col(v) * comm.h[k].col(v).adjoint();
            out[k].push_back(std::move(r));
        }
    }
    return out;
}

double j_metric(const CommChannel& comm, const PrecoderSet& prec, double mu) {
    check_shapes(comm, prec, "j_metric");
    const int k_count = comm.n_subcarriers();
    const int u_count = comm.n_users();
    KahanSum j;
    for (int k = 0; k < k_count; ++k) {
        const Eigen::MatrixXcd cross = comm.h[k].adjoint() * prec.p[k];
        for (int u = 0; u < u_count; ++u) {
            double interference = 0.0;
            for (int v = 0; v < u_count; ++v)
                if (v != u) interference += std::norm(cross(v, u));
            j.add(std::norm(cross(u, u)) - mu * interference);
        }
    }
    return j.value();
}

double j_metric_quadratic(const RuSet& ru, const PrecoderSet& prec) {
    if (ru.size() != prec.p.size())
        throw std::invalid_argument("j_metric_quadratic: subcarrier count mismatch");
    KahanSum j;
    for (std::size_t k = 0; k < ru.size(); ++k) {
        if (int(ru[k].size()) != prec.p[k].cols())
            throw std::invalid_argument("j_metric_quadratic: user count mismatch");
        for (std::size_t u = 0; u < ru[k].size(); ++u) {
            const Eigen::VectorXcd pu = prec.p[k].col(int(u));
            j.add(-std::real(pu.dot(ru[k][u] * pu)));
        }
    }
    return j.value();
}

SinrReport sinr_and_rate(const CommChannel& comm, const PrecoderSet& prec,
                         const ScenarioConfig& config) {
    const MetricField interference = mui(comm, prec);
    const MetricField gain = ecg(comm, prec);
    const double power_share = config.tx_power / double(comm.n_users());

    SinrReport out;
    out.sinr.resize(interference.per.rows(), interference.per.cols());
    KahanSum rate;
    for (int k = 0; k < out.sinr.rows(); ++k) {
        for (int u = 0; u < out.sinr.cols(); ++u) {
            const double s = power_share * gain.per(k, u) /
                             (power_share * interference.per(k, u) + config.noise_var_comm);
            out.sinr(k, u) = s;
            rate.add(log2_1p(s));
        }
    }
    out.sum_rate = rate.value();
    return out;
}

double sensing_mi(const SensingScene& scene, const PrecoderSet& prec,
                  const ScenarioConfig& config) {
    if (scene.n_subcarriers() != prec.n_subcarriers() ||
        scene.n_antennas() != prec.n_antennas())
        throw std::invalid_argument("sensing_mi: scene/precoder shape mismatch");
    KahanSum mi;
    for (int k = 0; k < scene.n_subcarriers(); ++k) {
        const double gain = (prec.p[k].adjoint() * scene.h_s[k]).squaredNorm();
        mi.add(log2_1p(config.tx_power * gain / config.noise_var_radar));
    }
    return mi.value();
}

SideConditions sinr_bound_conditions(const CommChannel& comm, const PrecoderSet& prec,
                                     const ScenarioConfig& config) {
    const MetricField interference = mui(comm, prec);
    const MetricField gain = ecg(comm, prec);
    const double noise_term = double(comm.n_users()) * config.noise_var_comm / config.tx_power;

    SideConditions out;
    out.noise_margin.resize(interference.per.rows(), interference.per.cols());
    out.gain_dominance.resize(interference.per.rows(), interference.per.cols());
    out.all_hold = true;
    for (int k = 0; k < interference.per.rows(); ++k) {
        for (int u = 0; u < interference.per.cols(); ++u) {
            out.noise_margin(k, u) = interference.per(k, u) + noise_term <= 1.0;
            out.gain_dominance(k, u) = gain.per(k, u) > config.mui_weight * interference.per(k, u);
            out.all_hold = out.all_hold && out.noise_margin(k, u) && out.gain_dominance(k, u);
        }
    }
    return out;
}

}  // namespace jcaswave
