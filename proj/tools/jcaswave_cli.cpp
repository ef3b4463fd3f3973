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
//
// Experiment harness. Subcommands:
//   sweep-snr        seeded Monte-Carlo sweep over SNR points
//   sweep-threshold  sweep over the rho/xi constraint thresholds
//   beam-pattern     transmit pattern CSV for a chosen design
//   validate         cross-module invariant suite (fast or full)
//
// Exit codes: 0 ok, 1 invariant violation, 2 config error, 3 every
// instance infeasible.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jcaswave/experiment.hpp"
#include "jcaswave/individual.hpp"
#include "jcaswave/validate.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool desk_scale = false;
    std::string fim_convention = "paper";
    std::string psi2_mode = "determinant";
    int threads = 0;
    bool timing = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "Experiment config file");
    cmd->add_option("--out", opts.out_path, "Output CSV path");
    cmd->add_option("--seed", opts.seed, "Master RNG seed")->each([&](const std::string&) {
        opts.seed_set = true;
    });
    cmd->add_flag("--desk-scale", opts.desk_scale, "Apply N=8, K=32 overrides");
    cmd->add_option("--fim-noise-convention", opts.fim_convention,
                    "FIM noise prefactor: paper (2/sigma) or variance (2/sigma^2)")
        ->check(CLI::IsMember({"paper", "variance"}));
    cmd->add_option("--psi2-mode", opts.psi2_mode,
                    "Covariance deviation reading: determinant or frobenius")
        ->check(CLI::IsMember({"determinant", "frobenius"}));
    cmd->add_option("--threads", opts.threads, "Worker threads for Monte-Carlo draws");
    cmd->add_flag("--timing", opts.timing,
                  "Record real wall-clock times (breaks byte-reproducibility)");
}

jcaswave::ExperimentConfig load_config(const CommonOptions& opts) {
    jcaswave::ExperimentConfig config;
    if (!opts.config_path.empty()) config = jcaswave::parse_config_file(opts.config_path);
    if (opts.seed_set) config.scenario.rng_seed = opts.seed;
    if (!opts.out_path.empty()) config.output_path = opts.out_path;
    if (opts.desk_scale) {
        config.scenario.n_antennas = 8;
        config.scenario.n_subcarriers = 32;
    }
    config.fim_convention = opts.fim_convention == "paper"
                                ? jcaswave::FimNoiseConvention::paper
                                : jcaswave::FimNoiseConvention::variance;
    config.jcas.psi2_mode = opts.psi2_mode == "determinant"
                                ? jcaswave::PsiDprimeMode::determinant
                                : jcaswave::PsiDprimeMode::frobenius;
    if (opts.threads > 0) config.n_threads = opts.threads;
    if (opts.timing) config.timing = true;
    return config;
}

int run_sweep_command(const CommonOptions& opts, jcaswave::SweepSpec::Kind kind,
                      const std::vector<double>& cli_values) {
    jcaswave::ExperimentConfig config = load_config(opts);
    config.sweep.kind = kind;
    if (!cli_values.empty()) config.sweep.values = cli_values;
    if (config.sweep.values.empty()) {
        config.sweep.values = kind == jcaswave::SweepSpec::Kind::snr
                                  ? std::vector<double>{-10, -5, 0, 5, 10, 15, 20}
                                  : std::vector<double>{0.5, 0.75, 1.0, 1.25, 1.5};
    }
    const jcaswave::SweepResult result = jcaswave::run_sweep(config);
    std::printf("wrote %zu rows (%d detail, %d infeasible) to %s\n", result.rows.size(),
                result.detail_rows, result.infeasible_rows, config.output_path.c_str());
    return result.detail_rows > 0 && result.infeasible_rows == result.detail_rows ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Broadband JCAS waveform optimization harness"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::vector<double> cli_values;
    std::string algorithm = "alg1";
    int subcarrier = 0;
    double grid_start = -90.0, grid_stop = 90.0, grid_step = 0.5;
    std::string level = "fast";

    CLI::App* sweep_snr = app.add_subcommand("sweep-snr", "Monte-Carlo sweep over SNR (dB)");
    add_common(sweep_snr, opts);
    sweep_snr->add_option("--values", cli_values, "SNR points in dB");

    CLI::App* sweep_thr =
        app.add_subcommand("sweep-threshold", "Monte-Carlo sweep over the rho/xi thresholds");
    add_common(sweep_thr, opts);
    sweep_thr->add_option("--values", cli_values, "Threshold points");

    CLI::App* beam = app.add_subcommand("beam-pattern", "Transmit beam pattern CSV");
    add_common(beam, opts);
    beam->add_option("--algorithm", algorithm, "comm_opt | mi_opt | crb_opt | alg1 | alg2")
        ->check(CLI::IsMember({"comm_opt", "mi_opt", "crb_opt", "alg1", "alg2"}));
    beam->add_option("--subcarrier", subcarrier, "Subcarrier index to plot");
    beam->add_option("--grid-start", grid_start, "First angle in degrees");
    beam->add_option("--grid-stop", grid_stop, "Last angle in degrees");
    beam->add_option("--grid-step", grid_step, "Angle step in degrees");

    CLI::App* validate_cmd = app.add_subcommand("validate", "Run the invariant suites");
    add_common(validate_cmd, opts);
    validate_cmd->add_option("--level", level, "fast | full")
        ->check(CLI::IsMember({"fast", "full"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep_snr->parsed())
            return run_sweep_command(opts, jcaswave::SweepSpec::Kind::snr, cli_values);
        if (sweep_thr->parsed())
            return run_sweep_command(opts, jcaswave::SweepSpec::Kind::threshold, cli_values);

        if (beam->parsed()) {
            jcaswave::ExperimentConfig config = load_config(opts);
            config.scenario.validate();
            jcaswave::ScenarioConfig sc = config.scenario;

            jcaswave::CommChannel comm;
            jcaswave::SensingScene scene;
            if (config.explicit_paths && config.explicit_targets) {
                comm = jcaswave::synth_comm_channel(sc, *config.explicit_paths);
                scene = jcaswave::synth_sensing_scene(sc, *config.explicit_targets);
            } else {
                auto drawn = jcaswave::draw_scenario(sc);
                comm = std::move(drawn.first);
                scene = std::move(drawn.second);
            }
            if (subcarrier < 0 || subcarrier >= sc.n_subcarriers) {
                std::fprintf(stderr, "subcarrier index out of range\n");
                return 2;
            }

            jcaswave::PrecoderSet prec;
            if (algorithm == "comm_opt") {
                prec = jcaswave::opt_comm_precoder(comm, sc.mui_weight);
            } else if (algorithm == "mi_opt") {
                prec = jcaswave::opt_mi_precoder(scene, comm, sc.mui_weight).prec;
            } else if (algorithm == "crb_opt") {
                const auto crb = jcaswave::opt_crb_covariance(scene, sc);
                for (const auto& q : crb.q)
                    prec.p.push_back(jcaswave::covariance_factor(q, sc.n_users));
            } else if (algorithm == "alg1") {
                prec = jcaswave::optimize_mi_constrained(comm, scene, sc, config.jcas).prec;
            } else {
                prec = jcaswave::optimize_crb_constrained(comm, scene, sc, config.jcas).prec;
            }

            std::vector<double> angles;
            for (double a = grid_start; a <= grid_stop + 1e-9; a += grid_step)
                angles.push_back(a);
            const auto pattern = jcaswave::beam_pattern(prec.p[subcarrier], angles);
            const std::string out = opts.out_path.empty() ? "beam_pattern.csv" : opts.out_path;
            jcaswave::write_beam_pattern_csv(pattern, out);
            std::printf("wrote %zu angles to %s\n", angles.size(), out.c_str());
            return 0;
        }

        if (validate_cmd->parsed()) {
            const auto report = jcaswave::validate(level == "fast"
                                                       ? jcaswave::ValidateLevel::fast
                                                       : jcaswave::ValidateLevel::full,
                                                   opts.seed_set ? opts.seed : 1);
            for (const auto& check : report.checks)
                std::printf("[%s] %-32s %s\n", check.passed ? "PASS" : "FAIL",
                            check.name.c_str(), check.detail.c_str());
            if (!report.all_passed()) {
                std::printf("validate: FAILED\n");
                return 1;
            }
            std::printf("validate: all %zu checks passed\n", report.checks.size());
            return 0;
        }
    } catch (const jcaswave::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const jcaswave::InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
