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

#include "jcaswave/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "jcaswave/individual.hpp"
#include "jcaswave/numeric.hpp"
#include "jcaswave/rng.hpp"

namespace jcaswave {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + value);
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config: bad integer value for '" + key + "': " + value);
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config: bad boolean value for '" + key + "': " + value);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::comm_opt: return "comm_opt";
        case Algorithm::mi_opt: return "mi_opt";
        case Algorithm::crb_opt: return "crb_opt";
        case Algorithm::alg1: return "alg1";
        case Algorithm::alg2: return "alg2";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    scenario.validate();
    jcas.validate();
    if (sweep.values.empty()) throw ConfigError("config: sweep values must be nonempty");
    if (n_monte_carlo < 1) throw ConfigError("config: n_monte_carlo must be >= 1");
    if (algorithms.empty()) throw ConfigError("config: need at least one algorithm");
    if (n_threads < 1) throw ConfigError("config: n_threads must be >= 1");
    if (explicit_paths &&
        (int(explicit_paths->size()) != scenario.n_users ||
         int(explicit_paths->front().size()) != scenario.n_paths_per_user))
        throw ConfigError("config: explicit path list shape does not match the scenario");
    if (explicit_targets && int(explicit_targets->size()) != scenario.n_targets)
        throw ConfigError("config: explicit target count does not match n_targets");
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig out;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::vector<std::vector<CommPath>> paths;
    std::vector<Target> targets;
    int line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("config line " + std::to_string(line_no) +
                                                      ": malformed section header");
            section = line.substr(1, line.size() - 2);
            if (section != "scenario" && section != "sweep" && section != "experiment" &&
                section != "jcas" && section != "comm_paths" && section != "targets")
                throw ConfigError("config: unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (section == "scenario") {
            auto& sc = out.scenario;
            if (key == "n_antennas") sc.n_antennas = int(parse_int(key, value));
            else if (key == "n_users") sc.n_users = int(parse_int(key, value));
            else if (key == "n_subcarriers") sc.n_subcarriers = int(parse_int(key, value));
            else if (key == "n_targets") sc.n_targets = int(parse_int(key, value));
            else if (key == "n_paths_per_user") sc.n_paths_per_user = int(parse_int(key, value));
            else if (key == "symbol_period") sc.symbol_period = parse_double(key, value);
            else if (key == "cp_length") sc.cp_length = parse_double(key, value);
            else if (key == "tx_power") sc.tx_power = parse_double(key, value);
            else if (key == "noise_var_radar") sc.noise_var_radar = parse_double(key, value);
            else if (key == "noise_var_comm") sc.noise_var_comm = parse_double(key, value);
            else if (key == "mui_weight") sc.mui_weight = parse_double(key, value);
            else if (key == "rng_seed") sc.rng_seed = std::uint64_t(parse_int(key, value));
            else if (key == "subcarrier_offset") sc.subcarrier_offset = int(parse_int(key, value));
            else throw ConfigError("config: unknown key '" + key + "' in [scenario]");
        } else if (section == "sweep") {
            if (key == "kind") {
                if (value == "snr") out.sweep.kind = SweepSpec::Kind::snr;
                else if (value == "threshold") out.sweep.kind = SweepSpec::Kind::threshold;
                else throw ConfigError("config: sweep kind must be snr or threshold");
            } else if (key == "values") {
                out.sweep.values.clear();
                for (const auto& tok : split_ws(value))
                    out.sweep.values.push_back(parse_double(key, tok));
            } else {
                throw ConfigError("config: unknown key '" + key + "' in [sweep]");
            }
        } else if (section == "experiment") {
            if (key == "algorithms") {
                out.algorithms.clear();
                for (const auto& tok : split_ws(value)) {
                    if (tok == "comm_opt") out.algorithms.push_back(Algorithm::comm_opt);
                    else if (tok == "mi_opt") out.algorithms.push_back(Algorithm::mi_opt);
                    else if (tok == "crb_opt") out.algorithms.push_back(Algorithm::crb_opt);
                    else if (tok == "alg1") out.algorithms.push_back(Algorithm::alg1);
                    else if (tok == "alg2") out.algorithms.push_back(Algorithm::alg2);
                    else throw ConfigError("config: unknown algorithm '" + tok + "'");
                }
            } else if (key == "n_monte_carlo") {
                out.n_monte_carlo = int(parse_int(key, value));
            } else if (key == "output_path") {
                out.output_path = value;
            } else if (key == "fim_noise_convention") {
                if (value == "paper") out.fim_convention = FimNoiseConvention::paper;
                else if (value == "variance") out.fim_convention = FimNoiseConvention::variance;
                else throw ConfigError("config: fim_noise_convention must be paper or variance");
            } else if (key == "psi2_mode") {
                if (value == "determinant") out.jcas.psi2_mode = PsiDprimeMode::determinant;
                else if (value == "frobenius") out.jcas.psi2_mode = PsiDprimeMode::frobenius;
                else throw ConfigError("config: psi2_mode must be determinant or frobenius");
            } else if (key == "n_threads") {
                out.n_threads = int(parse_int(key, value));
            } else if (key == "timing") {
                out.timing = parse_bool(key, value);
            } else {
                throw ConfigError("config: unknown key '" + key + "' in [experiment]");
            }
        } else if (section == "jcas") {
            auto& jp = out.jcas;
            if (key == "rho") jp.rho = parse_double(key, value);
            else if (key == "xi") jp.xi = parse_double(key, value);
            else if (key == "epsilon") jp.epsilon = parse_double(key, value);
            else if (key == "max_iters") jp.max_iters = int(parse_int(key, value));
            else if (key == "stall_tol") jp.stall_tol = parse_double(key, value);
            else if (key == "epsilon_halving") jp.epsilon_halving = parse_bool(key, value);
            else if (key == "use_closed_form") jp.use_closed_form = parse_bool(key, value);
            else throw ConfigError("config: unknown key '" + key + "' in [jcas]");
        } else if (section == "comm_paths") {
            if (key != "path") throw ConfigError("config: unknown key '" + key + "' in [comm_paths]");
            const auto toks = split_ws(value);
            if (toks.size() != 5)
                throw ConfigError("config: path wants: <user> <gain_re> <gain_im> <aod> <delay>");
            const int user = int(parse_int("path.user", toks[0]));
            if (user < 0) throw ConfigError("config: path user index must be >= 0");
            if (int(paths.size()) <= user) paths.resize(user + 1);
            CommPath p;
            p.gain = {parse_double("path.gain_re", toks[1]), parse_double("path.gain_im", toks[2])};
            p.equiv_aod = parse_double("path.aod", toks[3]);
            p.delay = parse_double("path.delay", toks[4]);
            paths[user].push_back(p);
        } else if (section == "targets") {
            if (key != "target") throw ConfigError("config: unknown key '" + key + "' in [targets]");
            const auto toks = split_ws(value);
            if (toks.size() != 4)
                throw ConfigError("config: target wants: <gain_re> <gain_im> <aod> <delay>");
            Target t;
            t.gain = {parse_double("target.gain_re", toks[0]), parse_double("target.gain_im", toks[1])};
            t.equiv_aod = parse_double("target.aod", toks[2]);
            t.delay = parse_double("target.delay", toks[3]);
            targets.push_back(t);
        } else {
            throw ConfigError("config line " + std::to_string(line_no) + ": key outside a section");
        }
    }

    if (!paths.empty()) out.explicit_paths = std::move(paths);
    if (!targets.empty()) out.explicit_targets = std::move(targets);
    return out;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

const char* const kSweepCsvHeader =
    "seed,draw,algorithm,sweep_kind,sweep_value,snr_db,rho,xi,j_value,sum_rate_bits,"
    "mi_bits,crb_total,iterations,wall_ms,termination";

namespace {

struct TaskOutput {
    std::vector<SweepRowData> rows;  // one per algorithm
};

SweepRowData compute_row(const ExperimentConfig& config, double sweep_value, int draw,
                         Algorithm algo) {
    ScenarioConfig sc = config.scenario;
    JcasParams jp = config.jcas;
    SweepRowData row;
    row.seed = config.scenario.rng_seed;
    row.draw = draw;
    row.algorithm = algorithm_name(algo);
    row.sweep_kind = config.sweep.kind == SweepSpec::Kind::snr ? "snr" : "threshold";
    row.sweep_value = sweep_value;

    if (config.sweep.kind == SweepSpec::Kind::snr) {
        const double noise = sc.tx_power * std::pow(10.0, -sweep_value / 10.0);
        sc.noise_var_comm = noise;
        sc.noise_var_radar = noise;
    } else {
        jp.rho = sweep_value;
        jp.xi = sweep_value;
    }
    row.snr_db = db_from_power(sc.tx_power / sc.noise_var_comm);
    row.rho = jp.rho;
    row.xi = jp.xi;

    sc.rng_seed = mix_seed(config.scenario.rng_seed, std::uint64_t(draw));

    const auto t0 = std::chrono::steady_clock::now();
    try {
        CommChannel comm;
        SensingScene scene;
        if (config.explicit_paths && config.explicit_targets) {
            comm = synth_comm_channel(sc, *config.explicit_paths);
            scene = synth_sensing_scene(sc, *config.explicit_targets);
        } else {
            auto drawn = draw_scenario(sc);
            comm = std::move(drawn.first);
            scene = std::move(drawn.second);
        }

        PrecoderSet prec;
        row.iterations = 0;
        switch (algo) {
            case Algorithm::comm_opt:
                prec = opt_comm_precoder(comm, sc.mui_weight);
                break;
            case Algorithm::mi_opt:
                prec = opt_mi_precoder(scene, comm, sc.mui_weight).prec;
                break;
            case Algorithm::crb_opt: {
                CrbCovarianceOptions opts;
                opts.convention = config.fim_convention;
                const CrbCovariance crb = opt_crb_covariance(scene, sc, opts);
                prec.p.reserve(crb.q.size());
                for (const auto& q : crb.q) prec.p.push_back(covariance_factor(q, sc.n_users));
                row.iterations = crb.iterations;
                break;
            }
            case Algorithm::alg1: {
                const JcasResult res = optimize_mi_constrained(comm, scene, sc, jp);
                prec = res.prec;
                row.iterations = res.trace.total_sweeps();
                row.termination = res.trace.termination_summary();
                break;
            }
            case Algorithm::alg2: {
                const JcasResult res = optimize_crb_constrained(comm, scene, sc, jp);
                prec = res.prec;
                row.iterations = res.trace.total_sweeps();
                row.termination = res.trace.termination_summary();
                break;
            }
        }
        if (row.termination.empty()) row.termination = "ok";

        row.j_value = j_metric(comm, prec, sc.mui_weight);
        row.sum_rate_bits = sinr_and_rate(comm, prec, sc).sum_rate;
        row.mi_bits = sensing_mi(scene, prec, sc);
        const FimReport rep = fim(scene, prec, sc, config.fim_convention);
        row.crb_total = rep.crb_valid ? rep.crb_total_value : kNaN;
    } catch (const std::exception&) {
        row.j_value = kNaN;
        row.sum_rate_bits = kNaN;
        row.mi_bits = kNaN;
        row.crb_total = kNaN;
        row.iterations = 0;
        row.termination = "infeasible";
    }
    const auto t1 = std::chrono::steady_clock::now();
    row.wall_ms = config.timing
                      ? std::chrono::duration<double, std::milli>(t1 - t0).count()
                      : 0.0;
    return row;
}

void write_row(std::FILE* f, const SweepRowData& r) {
    std::fprintf(f, "%llu,%d,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s\n",
                 static_cast<unsigned long long>(r.seed), r.draw, r.algorithm.c_str(),
                 r.sweep_kind.c_str(), format_double(r.sweep_value).c_str(),
                 format_double(r.snr_db).c_str(), format_double(r.rho).c_str(),
                 format_double(r.xi).c_str(), format_double(r.j_value).c_str(),
                 format_double(r.sum_rate_bits).c_str(), format_double(r.mi_bits).c_str(),
                 format_double(r.crb_total).c_str(), format_double(r.iterations).c_str(),
                 format_double(r.wall_ms).c_str(), r.termination.c_str());
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config) {
    config.validate();

    const int n_values = int(config.sweep.values.size());
    const int n_draws = config.n_monte_carlo;
    const int n_tasks = n_values * n_draws;
    std::vector<TaskOutput> outputs(n_tasks);

    // Draws are independent; rows are assembled in (value, draw) order after
    // the parallel phase so thread scheduling cannot reorder the file.
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int task = next.fetch_add(1); task < n_tasks; task = next.fetch_add(1)) {
            const int value_idx = task / n_draws;
            const int draw = task % n_draws;
            auto& out = outputs[task];
            out.rows.reserve(config.algorithms.size());
            for (const Algorithm algo : config.algorithms)
                out.rows.push_back(
                    compute_row(config, config.sweep.values[value_idx], draw, algo));
        }
    };
    if (config.n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(config.n_threads);
        for (int i = 0; i < config.n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    SweepResult result;
    for (const auto& out : outputs)
        for (const auto& row : out.rows) {
            result.detail_rows++;
            if (row.termination == "infeasible") result.infeasible_rows++;
            result.rows.push_back(row);
        }

    // Per (value, algorithm) means over the non-infeasible draws.
    for (int v = 0; v < n_values; ++v) {
        for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
            SweepRowData agg;
            agg.seed = config.scenario.rng_seed;
            agg.draw = -1;
            agg.algorithm = algorithm_name(config.algorithms[a]);
            agg.sweep_kind = config.sweep.kind == SweepSpec::Kind::snr ? "snr" : "threshold";
            agg.sweep_value = config.sweep.values[v];
            int count = 0;
            double snr = 0, rho = 0, xi = 0, j = 0, rate = 0, mi = 0, crb = 0, iters = 0, wall = 0;
            int crb_count = 0;
            for (int d = 0; d < n_draws; ++d) {
                const auto& row = outputs[v * n_draws + d].rows[a];
                if (row.termination == "infeasible") continue;
                ++count;
                snr += row.snr_db;
                rho += row.rho;
                xi += row.xi;
                j += row.j_value;
                rate += row.sum_rate_bits;
                mi += row.mi_bits;
                if (std::isfinite(row.crb_total)) {
                    crb += row.crb_total;
                    ++crb_count;
                }
                iters += row.iterations;
                wall += row.wall_ms;
            }
            if (count == 0) {
                agg.snr_db = agg.rho = agg.xi = agg.j_value = agg.sum_rate_bits = kNaN;
                agg.mi_bits = agg.crb_total = agg.wall_ms = kNaN;
                agg.iterations = 0;
                agg.termination = "infeasible";
            } else {
                agg.snr_db = snr / count;
                agg.rho = rho / count;
                agg.xi = xi / count;
                agg.j_value = j / count;
                agg.sum_rate_bits = rate / count;
                agg.mi_bits = mi / count;
                agg.crb_total = crb_count > 0 ? crb / crb_count : kNaN;
                agg.iterations = iters / count;
                agg.wall_ms = wall / count;
                agg.termination = "aggregate";
            }
            result.rows.push_back(std::move(agg));
        }
    }

    std::FILE* f = std::fopen(config.output_path.c_str(), "wb");
    if (!f) throw ConfigError("run_sweep: cannot write " + config.output_path);
    std::fprintf(f, "%s\n", kSweepCsvHeader);
    for (const auto& row : result.rows) write_row(f, row);
    std::fclose(f);
    return result;
}

BeamPattern beam_pattern(const Eigen::MatrixXcd& prec_k, const std::vector<double>& angles_deg) {
    if (angles_deg.empty()) throw std::invalid_argument("beam_pattern: empty angle grid");
    for (const double a : angles_deg)
        if (!(a >= -90.0) || !(a <= 90.0))
            throw std::invalid_argument("beam_pattern: angles must lie in [-90, 90] degrees");

    const int n = int(prec_k.rows());
    const int u_count = int(prec_k.cols());
    BeamPattern out;
    out.angles_deg = angles_deg;
    Eigen::MatrixXd power(int(angles_deg.size()), u_count);
    Eigen::VectorXd total(int(angles_deg.size()));
    for (std::size_t i = 0; i < angles_deg.size(); ++i) {
        const double omega = M_PI * std::sin(angles_deg[i] * M_PI / 180.0);
        const Eigen::VectorXcd a = array_response(omega, n);
        double sum = 0.0;
        for (int u = 0; u < u_count; ++u) {
            const double g = std::norm(a.dot(prec_k.col(u)));
            power(int(i), u) = g;
            sum += g;
        }
        total(int(i)) = sum;
    }
    const double peak = std::max(total.maxCoeff(), 1e-300);
    out.column_db.resize(power.rows(), power.cols());
    out.total_db.resize(total.size());
    for (int i = 0; i < power.rows(); ++i) {
        for (int u = 0; u < u_count; ++u)
            out.column_db(i, u) = db_from_power(std::max(power(i, u), 1e-30 * peak) / peak);
        out.total_db(i) = db_from_power(std::max(total(i), 1e-30 * peak) / peak);
    }
    return out;
}

void write_beam_pattern_csv(const BeamPattern& pattern, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw ConfigError("beam_pattern: cannot write " + path);
    std::fprintf(f, "angle_deg");
    for (int u = 0; u < pattern.column_db.cols(); ++u) std::fprintf(f, ",power_db_u%d", u);
    std::fprintf(f, ",power_db_total\n");
    for (std::size_t i = 0; i < pattern.angles_deg.size(); ++i) {
        std::fprintf(f, "%s", format_double(pattern.angles_deg[i]).c_str());
        for (int u = 0; u < pattern.column_db.cols(); ++u)
            std::fprintf(f, ",%s", format_double(pattern.column_db(int(i), u)).c_str());
        std::fprintf(f, ",%s\n", format_double(pattern.total_db(int(i))).c_str());
    }
    std::fclose(f);
}

std::vector<int> pattern_peaks(const BeamPattern& pattern) {
    std::vector<int> peaks;
    const auto& t = pattern.total_db;
    for (int i = 0; i < t.size(); ++i) {
        const bool left_ok = i == 0 || t(i) > t(i - 1);
        const bool right_ok = i + 1 == t.size() || t(i) >= t(i + 1);
        if (left_ok && right_ok) peaks.push_back(i);
    }
    std::sort(peaks.begin(), peaks.end(), [&](int a, int b) { return t(a) > t(b); });
    return peaks;
}

}  // namespace jcaswave
