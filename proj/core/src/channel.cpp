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

#include "jcaswave/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "jcaswave/rng.hpp"

namespace jcaswave {

namespace {

constexpr std::complex<double> kJ{0.0, 1.0};

// Stream kinds for draw_scenario; values are part of the seeding contract.
enum StreamKind : std::uint64_t {
    kCommGain = 1,
    kCommAod = 2,
    kCommDelay = 3,
    kTargetGain = 4,
    kTargetAod = 5,
    kTargetDelay = 6,
};

void check_delay(double delay, double cp_length, const char* what) {
    if (!(delay >= 0.0) || !(delay <= cp_length))
        throw std::invalid_argument(std::string(what) + ": delay outside [0, cp_length]");
}

std::complex<double> delay_phase(int k, double tau, double symbol_period) {
    const double arg = -2.0 * M_PI * double(k) * tau / symbol_period;
    return {std::cos(arg), std::sin(arg)};
}

}  // namespace

Eigen::VectorXcd array_response(double equiv_aod, int n_antennas) {
    if (n_antennas < 1) throw std::invalid_argument("array_response: n_antennas must be >= 1");
    Eigen::VectorXcd a(n_antennas);
    const double scale = 1.0 / std::sqrt(double(n_antennas));
    for (int n = 0; n < n_antennas; ++n) {
        const double arg = double(n) * equiv_aod;
        a(n) = scale * std::complex<double>(std::cos(arg), std::sin(arg));
    }
    return a;
}

Eigen::VectorXcd steering_derivative(double equiv_aod, int n_antennas) {
    if (n_antennas < 1) throw std::invalid_argument("steering_derivative: n_antennas must be >= 1");
    Eigen::VectorXcd d(n_antennas);
    const double scale = 1.0 / std::sqrt(double(n_antennas));
    for (int n = 0; n < n_antennas; ++n) {
        const double arg = double(n) * equiv_aod;
        d(n) = scale * double(n) * kJ * std::complex<double>(std::cos(arg), std::sin(arg));
    }
    return d;
}

CommChannel synth_comm_channel(const ScenarioConfig& config,
                               const std::vector<std::vector<CommPath>>& paths) {
    config.validate();
    if (int(paths.size()) != config.n_users)
        throw std::invalid_argument("synth_comm_channel: need one path list per user");
    for (const auto& user_paths : paths) {
        if (user_paths.empty())
            throw std::invalid_argument("synth_comm_channel: user with no paths");
        for (const auto& p : user_paths) check_delay(p.delay, config.cp_length, "synth_comm_channel");
    }

    const int n = config.n_antennas;
    const int u_count = config.n_users;
    const int k_count = config.n_subcarriers;

    // Per-path steering vectors are k-independent; hoist them out of the k loop.
    std::vector<std::vector<Eigen::VectorXcd>> steered(paths.size());
    for (std::size_t u = 0; u < paths.size(); ++u)
        for (const auto& p : paths[u]) steered[u].push_back(array_response(p.equiv_aod, n));

    CommChannel out;
    out.paths = paths;
    out.h.reserve(k_count);
    for (int i = 0; i < k_count; ++i) {
        const int k = config.subcarrier_index(i);
        Eigen::MatrixXcd hk = Eigen::MatrixXcd::Zero(n, u_count);
        for (int u = 0; u < u_count; ++u) {
            for (std::size_t l = 0; l < paths[u].size(); ++l) {
                const auto& p = paths[u][l];
                hk.col(u) += p.gain * delay_phase(k, p.delay, config.symbol_period) * steered[u][l];
            }
        }
        out.h.push_back(std::move(hk));
    }
    return out;
}

SensingScene synth_sensing_scene(const ScenarioConfig& config,
                                 const std::vector<Target>& targets) {
    config.validate();
    if (targets.empty()) throw std::invalid_argument("synth_sensing_scene: no targets");
    for (const auto& t : targets) check_delay(t.delay, config.cp_length, "synth_sensing_scene");

    const int n = config.n_antennas;
    const int l_count = int(targets.size());
    const int k_count = config.n_subcarriers;

    SensingScene out;
    out.targets = targets;
    out.steering.resize(n, l_count);
    out.gains.resize(l_count);
    for (int l = 0; l < l_count; ++l) {
        out.steering.col(l) = array_response(targets[l].equiv_aod, n);
        out.gains(l) = targets[l].gain;
    }

    out.phase.reserve(k_count);
    out.h_s.reserve(k_count);
    for (int i = 0; i < k_count; ++i) {
        const int k = config.subcarrier_index(i);
        Eigen::VectorXcd w(l_count);
        for (int l = 0; l < l_count; ++l) w(l) = delay_phase(k, targets[l].delay, config.symbol_period);

        // Factorized form A X W 1.
        Eigen::VectorXcd h = out.steering * (out.gains.array() * w.array()).matrix();

        // Direct summation form; both must agree to 1e-12 relative.
        Eigen::VectorXcd h_direct = Eigen::VectorXcd::Zero(n);
        for (int l = 0; l < l_count; ++l)
            h_direct += targets[l].gain * w(l) * out.steering.col(l);
        const double scale = std::max(h.norm(), 1e-300);
        if ((h - h_direct).norm() > 1e-12 * scale)
            throw std::runtime_error("synth_sensing_scene: factorized and summed channel disagree");

        out.phase.push_back(std::move(w));
        out.h_s.push_back(std::move(h));
    }
    return out;
}

std::pair<CommChannel, SensingScene> draw_scenario(const ScenarioConfig& config) {
    config.validate();

    std::vector<std::vector<CommPath>> paths(config.n_users);
    for (int u = 0; u < config.n_users; ++u) {
        paths[u].resize(config.n_paths_per_user);
        for (int l = 0; l < config.n_paths_per_user; ++l) {
            const std::uint64_t idx = std::uint64_t(u) * std::uint64_t(config.n_paths_per_user) + std::uint64_t(l);
            paths[u][l].gain = StreamRng(config.rng_seed, kCommGain, idx).complex_gaussian();
            paths[u][l].equiv_aod = StreamRng(config.rng_seed, kCommAod, idx).uniform(-M_PI, M_PI);
            paths[u][l].delay = StreamRng(config.rng_seed, kCommDelay, idx).uniform(0.0, config.cp_length);
        }
    }

    std::vector<Target> targets(config.n_targets);
    for (int l = 0; l < config.n_targets; ++l) {
        const auto idx = std::uint64_t(l);
        targets[l].gain = StreamRng(config.rng_seed, kTargetGain, idx).complex_gaussian();
        targets[l].equiv_aod = StreamRng(config.rng_seed, kTargetAod, idx).uniform(-M_PI, M_PI);
        targets[l].delay = StreamRng(config.rng_seed, kTargetDelay, idx).uniform(0.0, config.cp_length);
    }

    return {synth_comm_channel(config, paths), synth_sensing_scene(config, targets)};
}

}  // namespace jcaswave
