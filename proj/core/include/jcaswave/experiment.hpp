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

#ifndef JCASWAVE_EXPERIMENT_HPP
#define JCASWAVE_EXPERIMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "jcaswave/channel.hpp"
#include "jcaswave/fim.hpp"
#include "jcaswave/jcas_opt.hpp"
#include "jcaswave/metrics.hpp"
#include "jcaswave/scenario.hpp"

namespace jcaswave {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Algorithm { comm_opt, mi_opt, crb_opt, alg1, alg2 };

std::string algorithm_name(Algorithm a);

struct SweepSpec {
    enum class Kind { snr, threshold } kind = Kind::snr;
    std::vector<double> values;
};

/// One seeded Monte-Carlo experiment: scenario, sweep axis, algorithms to
/// run, and output location.
struct ExperimentConfig {
    ScenarioConfig scenario;
    SweepSpec sweep;
    std::vector<Algorithm> algorithms{Algorithm::comm_opt, Algorithm::alg1};
    JcasParams jcas;
    int n_monte_carlo = 1;
    std::string output_path = "sweep.csv";
    FimNoiseConvention fim_convention = FimNoiseConvention::paper;
    int n_threads = 1;
    bool timing = false;  // real wall_ms values break byte-reproducibility

    // Optional explicit scenario replay; when set they replace the random
    // draw on every Monte-Carlo iteration.
    std::optional<std::vector<std::vector<CommPath>>> explicit_paths;
    std::optional<std::vector<Target>> explicit_targets;

    void validate() const;
};

/// Parses the sectioned key/value config format. Unknown sections or keys
/// are rejected with a ConfigError naming the offender.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Fixed CSV schema of run_sweep, one header plus one row per
/// (sweep value, draw, algorithm) and per-(value, algorithm) aggregate rows
/// with draw = -1. Identical config and seed give byte-identical files.
extern const char* const kSweepCsvHeader;

struct SweepRowData {
    std::uint64_t seed = 0;
    int draw = 0;
    std::string algorithm;
    std::string sweep_kind;
    double sweep_value = 0.0;
    double snr_db = 0.0;
    double rho = 0.0;
    double xi = 0.0;
    double j_value = 0.0;
    double sum_rate_bits = 0.0;
    double mi_bits = 0.0;
    double crb_total = 0.0;
    double iterations = 0.0;  // mean for aggregate rows
    double wall_ms = 0.0;
    std::string termination;
};

struct SweepResult {
    std::vector<SweepRowData> rows;  // detail rows then aggregates, CSV order
    int infeasible_rows = 0;
    int detail_rows = 0;
};

/// Runs the sweep and writes the CSV; returns the row set for callers that
/// post-process. Throws ConfigError for unwritable paths.
SweepResult run_sweep(const ExperimentConfig& config);

/// Transmit pattern of one subcarrier's precoder over a grid of angles
/// (degrees, within [-90, 90]); power in dB normalized to the total's peak.
struct BeamPattern {
    std::vector<double> angles_deg;
    Eigen::MatrixXd column_db;  // angles x U
    Eigen::VectorXd total_db;
};
BeamPattern beam_pattern(const Eigen::MatrixXcd& prec_k, const std::vector<double>& angles_deg);

void write_beam_pattern_csv(const BeamPattern& pattern, const std::string& path);

/// Indices of local maxima of the total pattern, strongest first.
std::vector<int> pattern_peaks(const BeamPattern& pattern);

}  // namespace jcaswave

#endif  // JCASWAVE_EXPERIMENT_HPP
