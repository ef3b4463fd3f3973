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
// Integration gate: one self-contained check per release criterion, each
// printed as a single pass/fail line. Exit status is the number of failed
// criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "jcaswave/channel.hpp"
#include "jcaswave/experiment.hpp"
#include "jcaswave/fim.hpp"
#include "jcaswave/individual.hpp"
#include "jcaswave/jcas_opt.hpp"
#include "jcaswave/metrics.hpp"
#include "jcaswave/oracle.hpp"
#include "jcaswave/rng.hpp"

using namespace jcaswave;

namespace {

int g_failures = 0;

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

void report(int id, const char* name, bool passed, const std::string& detail, double seconds) {
    if (!passed) ++g_failures;
    std::printf("[%s] criterion %d: %-28s %s (%.1f s)\n", passed ? "PASS" : "FAIL", id, name,
                detail.c_str(), seconds);
    std::fflush(stdout);
}

ScenarioConfig scenario(int n, int u, int k, int l, int lu, std::uint64_t seed) {
    ScenarioConfig sc;
    sc.n_antennas = n;
    sc.n_users = u;
    sc.n_subcarriers = k;
    sc.n_targets = l;
    sc.n_paths_per_user = lu;
    sc.rng_seed = seed;
    return sc;
}

PrecoderSet random_unit_precoder(const ScenarioConfig& sc, std::uint64_t seed) {
    PrecoderSet prec;
    for (int k = 0; k < sc.n_subcarriers; ++k) {
        Eigen::MatrixXcd pk(sc.n_antennas, sc.n_users);
        for (int u = 0; u < sc.n_users; ++u) {
            StreamRng rng(seed, 40 + k, u);
            for (int i = 0; i < sc.n_antennas; ++i) pk(i, u) = rng.complex_gaussian();
            pk.col(u).normalize();
        }
        prec.p.push_back(pk);
    }
    return prec;
}

// --- criterion 1: the regulated bound under the SINR sum -------------------

void criterion_1() {
    Timer timer;
    const int wanted = 10000;
    int accepted = 0;
    int violations = 0;
    double worst_margin = 1e300;
    for (int attempt = 0; accepted < wanted && attempt < 200000; ++attempt) {
        ScenarioConfig sc = scenario(8, 2, 4, 3, 3, mix_seed(101, attempt));
        sc.noise_var_comm = 1e-3;
        auto [comm, scene] = draw_scenario(sc);
        (void)scene;
        PrecoderSet prec = zero_forcing_precoder(comm);
        StreamRng rng(102, 1, attempt);
        for (auto& pk : prec.p)
            for (int u = 0; u < pk.cols(); ++u) {
                for (int i = 0; i < pk.rows(); ++i) pk(i, u) += 0.15 * rng.complex_gaussian();
                pk.col(u).normalize();
            }
        if (!sinr_bound_conditions(comm, prec, sc).all_hold) continue;
        ++accepted;
        const double margin = sinr_and_rate(comm, prec, sc).sinr.sum() -
                              j_metric(comm, prec, sc.mui_weight);
        worst_margin = std::min(worst_margin, margin);
        if (margin < -1e-9) ++violations;
    }
    const double secs = timer.seconds();
    std::ostringstream detail;
    detail << accepted << " accepted draws, " << violations
           << " violations, worst margin " << worst_margin;
    report(1, "sinr lower bound", accepted >= wanted && violations == 0 && secs < 30.0,
           detail.str(), secs);
}

// --- criterion 2: dual-form metric identities -------------------------------

void criterion_2() {
    Timer timer;
    double worst_mui = 0.0, worst_j = 0.0, worst_mi = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const ScenarioConfig sc = scenario(4, 2, 2, 2, 2, mix_seed(210, t));
        auto [comm, scene] = draw_scenario(sc);
        const PrecoderSet prec = random_unit_precoder(sc, mix_seed(211, t));

        const double mui_main = mui(comm, prec).total;
        worst_mui = std::max(worst_mui,
                             std::abs(mui_main - oracle::mui_offdiag_frobenius(comm, prec)) /
                                 std::max(std::abs(mui_main), 1e-30));

        const double j_main = j_metric(comm, prec, sc.mui_weight);
        const double j_quad = j_metric_quadratic(build_ru(comm, sc.mui_weight), prec);
        worst_j = std::max(worst_j,
                           std::abs(j_main - j_quad) / std::max(std::abs(j_main), 1e-30));

        const double mi_main = sensing_mi(scene, prec, sc);
        worst_mi = std::max(worst_mi,
                            std::abs(mi_main - oracle::mi_determinant(scene, prec, sc)) /
                                std::max(std::abs(mi_main), 1e-30));
    }
    std::ostringstream detail;
    detail << "worst relative gaps: mui " << worst_mui << ", j " << worst_j << ", mi "
           << worst_mi;
    report(2, "metric dual forms",
           worst_mui <= 1e-10 && worst_j <= 1e-10 && worst_mi <= 1e-9, detail.str(),
           timer.seconds());
}

// --- criterion 3: Fisher information correctness ----------------------------

void criterion_3() {
    Timer timer;
    bool ok = true;
    double worst = 0.0;
    std::string why;
    for (int t = 0; t < 100; ++t) {
        const ScenarioConfig sc = scenario(4, 2, 4, 2, 2, mix_seed(310, t));
        auto [comm, scene] = draw_scenario(sc);
        (void)comm;
        const PrecoderSet prec = random_unit_precoder(sc, mix_seed(311, t));
        const FimReport rep = fim(scene, prec, sc);
        const Eigen::MatrixXd numeric = oracle::numeric_fim(scene, prec, sc);
        const double rel = (rep.fim - numeric).norm() / numeric.norm();
        worst = std::max(worst, rel);
        if (rel >= 1e-4) {
            ok = false;
            why = "numeric mismatch";
        }
        const double asym = (rep.fim - rep.fim.transpose()).norm() / rep.fim.norm();
        if (asym > 1e-9) {
            ok = false;
            why = "asymmetric";
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.fim);
        if (es.eigenvalues().minCoeff() < -1e-8 * rep.fim.norm()) {
            ok = false;
            why = "not PSD";
        }
    }

    // Per-subcarrier growth of the delay block against the gain block.
    const ScenarioConfig sc = scenario(4, 2, 33, 2, 2, 312);
    auto [comm, scene] = draw_scenario(sc);
    (void)comm;
    const FimReport rep = fim(scene, random_unit_precoder(sc, 313), sc);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const int k : {4, 8, 16, 32}) {
        const double x = std::log(double(k));
        const double y = std::log(rep.f4_f1_ratio[std::size_t(k)]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (4.0 * sxy - sx * sy) / (4.0 * sxx - sx * sx);
    if (std::abs(slope - 2.0) > 0.1) {
        ok = false;
        why = "ratio slope " + std::to_string(slope);
    }
    std::ostringstream detail;
    detail << "worst numeric gap " << worst << ", k^2 slope " << slope
           << (why.empty() ? "" : (", " + why));
    report(3, "fim vs numeric oracle", ok, detail.str(), timer.seconds());
}

// --- criterion 4: individual optimality dominance ---------------------------

void criterion_4() {
    Timer timer;
    bool ok = true;
    std::ostringstream detail;

    {
        const ScenarioConfig sc = scenario(4, 2, 1, 2, 2, 410);
        auto [comm, scene] = draw_scenario(sc);
        const MiPrecoderResult mi_star = opt_mi_precoder(scene, comm, sc.mui_weight);
        const auto dom_mi = oracle::random_dominance(
            mi_star.prec, comm, scene, sc, oracle::DominanceMetric::sensing_mi, 100000, 411);
        const PrecoderSet comm_star = opt_comm_precoder(comm, sc.mui_weight);
        const auto dom_j = oracle::random_dominance(
            comm_star, comm, scene, sc, oracle::DominanceMetric::j_bound, 100000, 412);
        ok = ok && dom_mi.pass && dom_j.pass;
        detail << "mi margin " << dom_mi.worst_gap << ", j margin " << dom_j.worst_gap;
    }

    {
        ScenarioConfig sc = scenario(4, 2, 1, 2, 2, 413);
        sc.subcarrier_offset = 1;  // k = 1 keeps the delay block alive at K = 1
        auto [comm, scene] = draw_scenario(sc);
        (void)comm;
        const CrbCovariance res = opt_crb_covariance(scene, sc);

        const double pref = 2.0 / std::sqrt(sc.noise_var_radar);
        const double rate = 2.0 * M_PI * 1.0 / sc.symbol_period;
        const Eigen::MatrixXcd gain_outer = scene.gains.conjugate() * scene.gains.transpose();
        auto objective = [&](const Eigen::MatrixXcd& q) {
            const Eigen::MatrixXcd m = scene.steering.adjoint() * q * scene.steering;
            const Eigen::MatrixXcd f4 = pref * rate * rate *
                                        (scene.phase[0].conjugate().asDiagonal() *
                                         m.cwiseProduct(gain_outer) *
                                         scene.phase[0].asDiagonal());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(f4.real()));
            return es.eigenvalues()(0);
        };
        double best = -1e300;
        for (int t = 0; t < 1000000; ++t) {
            StreamRng rng(414, 1, t);
            Eigen::MatrixXcd b(sc.n_antennas, sc.n_antennas);
            for (int i = 0; i < b.size(); ++i) b.data()[i] = rng.complex_gaussian();
            Eigen::MatrixXcd q = b * b.adjoint();
            q *= double(sc.n_users) / q.real().trace();
            best = std::max(best, objective(q));
        }
        const bool within = res.t[0] >= best * (1.0 - 0.02);
        ok = ok && within;
        detail << ", crb objective " << res.t[0] << " vs oracle best " << best;
    }
    report(4, "individual dominance", ok, detail.str(), timer.seconds());
}

// --- criterion 5: joint solver contracts on tiny instances ------------------

std::vector<CommPath> real_paths(double x, double y) {
    const double b1 = (x + y) / std::sqrt(2.0);
    const double b2 = (x - y) / std::sqrt(2.0);
    return {CommPath{{b1, 0.0}, 0.0, 0.0}, CommPath{{b2, 0.0}, M_PI, 0.0}};
}

std::vector<Target> real_targets(double x, double y) {
    const double b1 = (x + y) / std::sqrt(2.0);
    const double b2 = (x - y) / std::sqrt(2.0);
    return {Target{{b1, 0.0}, 0.0, 0.0}, Target{{b2, 0.0}, M_PI, 0.0}};
}

void criterion_5() {
    Timer timer;
    bool ok = true;
    double worst_gap = 0.0;
    double worst_angle = 0.0;
    std::string why;

    for (const ConstraintKind kind : {ConstraintKind::mi, ConstraintKind::crb}) {
        for (int t = 0; t < 30; ++t) {
            ScenarioConfig sc = scenario(2, 1, 1, 2, 2, mix_seed(510, t));
            if (kind == ConstraintKind::crb) sc.subcarrier_offset = 1;
            StreamRng rng(mix_seed(511, t), std::uint64_t(kind), 0);
            const double hx = rng.uniform(-1.5, 1.5);
            const double hy = rng.uniform(-1.5, 1.5);
            double gx = rng.uniform(-1.5, 1.5);
            const double gy = rng.uniform(-1.5, 1.5);
            if (std::abs(gx) + std::abs(gy) < 1e-3) gx = 0.5;
            const CommChannel comm = synth_comm_channel(sc, {real_paths(hx, hy)});
            const SensingScene scene = synth_sensing_scene(sc, real_targets(gx, gy));

            JcasParams params;
            params.use_closed_form = false;
            params.record_steps = true;
            params.rho = 0.2 + rng.uniform() * 1.0;
            params.xi = 0.1 + rng.uniform() * 0.7;

            const JcasResult res = kind == ConstraintKind::mi
                                       ? optimize_mi_constrained(comm, scene, sc, params)
                                       : optimize_crb_constrained(comm, scene, sc, params);

            // Monotone -J over accepted steps.
            double prev = 1e300;
            for (const auto& rec : res.trace.per_k[0].records) {
                if (rec.neg_j > prev + 1e-12) {
                    ok = false;
                    why = "-J increased";
                }
                prev = rec.neg_j;
            }
            // Feasibility at the output.
            if (constraint_psi(res.prec.p[0]) > sc.n_users + 1e-8) {
                ok = false;
                why = "power violated";
            }
            if (kind == ConstraintKind::mi) {
                const auto center = opt_mi_precoder(scene, comm, sc.mui_weight).prec.p[0];
                if (constraint_psi_prime(res.prec.p[0], center) > params.rho + 1e-8) {
                    ok = false;
                    why = "mi distance violated";
                }
            } else {
                const auto q = opt_crb_covariance(scene, sc).q[0];
                if (constraint_psi_dprime(res.prec.p[0], q, params.psi2_mode) >
                    params.xi + 1e-8) {
                    ok = false;
                    why = "covariance deviation violated";
                }
            }

            // Stationarity at termination.
            const TangencyReport tang =
                kkt_tangency(comm, scene, sc, params, kind, res.prec);
            worst_angle = std::max(worst_angle, tang.max_angle);
            if (tang.max_angle >= 1e-3) {
                ok = false;
                why = "tangency angle " + std::to_string(tang.max_angle);
            }

            // Exhaustive reference on the real-restricted plane.
            oracle::GridSpec grid;
            grid.dims = 2;
            grid.lo = -1.05;
            grid.hi = 1.05;
            grid.step = 1e-3;
            const auto ref = oracle::grid_search_j(comm, scene, sc, params, kind, grid);
            const double j_alg = j_metric(comm, res.prec, sc.mui_weight);
            const double gap = (ref.best_j - j_alg) / std::max(std::abs(ref.best_j), 1e-12);
            worst_gap = std::max(worst_gap, gap);
            if (gap > 0.02) {
                ok = false;
                why = "grid gap " + std::to_string(gap);
            }
        }
    }
    std::ostringstream detail;
    detail << "worst grid gap " << worst_gap << ", worst tangency angle " << worst_angle
           << (why.empty() ? "" : (", " + why));
    report(5, "joint solver contracts", ok, detail.str(), timer.seconds());
}

// --- criterion 6: closed form vs iterative ----------------------------------

void criterion_6() {
    Timer timer;
    bool ok = true;
    int found = 0;
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const bool crb_kind = t >= 14;
        ScenarioConfig sc = scenario(4, 2, 1, 2, 2, mix_seed(610, t));
        if (crb_kind) sc.subcarrier_offset = 1;
        auto [comm, scene] = draw_scenario(sc);

        JcasParams params;
        // Beyond the feasible diameter, so the scaled-eigenvector solution
        // exists and nothing blocks the iterative path toward it.
        params.rho = 10.0;
        params.xi = 1e4;
        const ConstraintKind kind = crb_kind ? ConstraintKind::crb : ConstraintKind::mi;
        const auto cf = closed_form_jcas(comm, scene, sc, params, kind);
        if (!cf) continue;
        ++found;

        JcasParams no_cf = params;
        no_cf.use_closed_form = false;
        const JcasResult res = kind == ConstraintKind::mi
                                   ? optimize_mi_constrained(comm, scene, sc, no_cf)
                                   : optimize_crb_constrained(comm, scene, sc, no_cf);
        const double j_cf = j_metric(comm, *cf, sc.mui_weight);
        const double j_it = j_metric(comm, res.prec, sc.mui_weight);
        const double gap = std::abs(j_cf - j_it) / std::max(std::abs(j_cf), 1e-12);
        worst = std::max(worst, gap);
        if (gap > 1e-4) ok = false;
    }
    std::ostringstream detail;
    detail << found << "/20 closed forms found, worst relative gap " << worst;
    report(6, "closed-form consistency", ok && found == 20, detail.str(), timer.seconds());
}

// --- criterion 7: trend reproduction at desk scale --------------------------

void criterion_7() {
    Timer timer;
    bool ok = true;
    std::ostringstream detail;

    const int draws = 100;
    const std::vector<double> rhos{0.5, 1.0, 1.5};

    // (a) paired-draw means of the MI-constrained design across rho.
    std::vector<double> mean_rate(rhos.size(), 0.0);
    std::vector<double> mean_mi(rhos.size(), 0.0);
    // (b) CRBs of both joint designs at rho = xi + 0.11.
    const double xi_b = 1.0;
    const double rho_b = xi_b + 0.11;
    double crb_alg1 = 0.0, crb_alg2 = 0.0;
    int crb_count = 0;

    for (int d = 0; d < draws; ++d) {
        ScenarioConfig sc = scenario(8, 2, 32, 3, 3, mix_seed(710, d));
        auto [comm, scene] = draw_scenario(sc);

        JcasParams params;
        for (std::size_t r = 0; r < rhos.size(); ++r) {
            params.rho = rhos[r];
            const JcasResult res = optimize_mi_constrained(comm, scene, sc, params);
            mean_rate[r] += sinr_and_rate(comm, res.prec, sc).sum_rate / draws;
            mean_mi[r] += sensing_mi(scene, res.prec, sc) / draws;
        }

        params.rho = rho_b;
        const JcasResult res1 = optimize_mi_constrained(comm, scene, sc, params);
        JcasParams params2;
        params2.xi = xi_b;
        // The deviation measured as a norm puts xi on the same scale as rho.
        params2.psi2_mode = PsiDprimeMode::frobenius;
        const JcasResult res2 = optimize_crb_constrained(comm, scene, sc, params2);
        const FimReport rep1 = fim(scene, res1.prec, sc);
        const FimReport rep2 = fim(scene, res2.prec, sc);
        if (rep1.crb_valid && rep2.crb_valid) {
            crb_alg1 += rep1.crb_total_value;
            crb_alg2 += rep2.crb_total_value;
            ++crb_count;
        }
    }

    for (std::size_t r = 1; r < rhos.size(); ++r) {
        if (mean_rate[r] < mean_rate[r - 1]) {
            ok = false;
            detail << "sum rate not monotone at rho " << rhos[r] << "; ";
        }
        if (mean_mi[r] > mean_mi[r - 1]) {
            ok = false;
            detail << "MI not anti-monotone at rho " << rhos[r] << "; ";
        }
    }
    detail << "rate(rho) = [" << mean_rate[0] << ", " << mean_rate[1] << ", " << mean_rate[2]
           << "], mi(rho) = [" << mean_mi[0] << ", " << mean_mi[1] << ", " << mean_mi[2] << "]";

    if (crb_count < draws / 2) {
        ok = false;
        detail << "; too few valid CRBs (" << crb_count << ")";
    } else {
        crb_alg1 /= crb_count;
        crb_alg2 /= crb_count;
        const double rel = std::abs(crb_alg1 - crb_alg2) / std::max(crb_alg1, crb_alg2);
        detail << "; crb gap " << rel * 100.0 << "% over " << crb_count << " draws";
        if (rel >= 0.05) ok = false;
    }

    // (c) beam pattern of the joint design against the individual designs,
    // on the full 16-antenna array of the one-user one-target scene.
    {
        ScenarioConfig sc = scenario(16, 1, 8, 1, 1, 711);
        const double mu_aod = M_PI * std::sin(45.0 * M_PI / 180.0);
        const double tgt_aod = M_PI * std::sin(-35.0 * M_PI / 180.0);
        const CommChannel comm =
            synth_comm_channel(sc, {{CommPath{{1.0, 0.0}, mu_aod, 1.0e-5}}});
        const SensingScene scene =
            synth_sensing_scene(sc, {Target{{1.0, 0.0}, tgt_aod, 2.0e-5}});

        std::vector<double> angles;
        for (double a = -90.0; a <= 90.0; a += 0.25) angles.push_back(a);

        const PrecoderSet comm_star = opt_comm_precoder(comm, sc.mui_weight);
        const PrecoderSet mi_star = opt_mi_precoder(scene, comm, sc.mui_weight).prec;
        JcasParams params;  // rho = 1
        const JcasResult joint = optimize_mi_constrained(comm, scene, sc, params);

        const BeamPattern comm_pat = beam_pattern(comm_star.p[0], angles);
        const BeamPattern mi_pat = beam_pattern(mi_star.p[0], angles);
        const BeamPattern joint_pat = beam_pattern(joint.prec.p[0], angles);

        const double comm_peak = angles[std::size_t(pattern_peaks(comm_pat)[0])];
        const double mi_peak = angles[std::size_t(pattern_peaks(mi_pat)[0])];
        const auto joint_peaks = pattern_peaks(joint_pat);
        double best_comm = 1e9, best_mi = 1e9;
        const std::size_t lobes = std::min<std::size_t>(2, joint_peaks.size());
        for (std::size_t i = 0; i < lobes; ++i) {
            const double a = angles[std::size_t(joint_peaks[i])];
            best_comm = std::min(best_comm, std::abs(a - comm_peak));
            best_mi = std::min(best_mi, std::abs(a - mi_peak));
        }
        detail << "; beam peaks off by " << best_comm << " and " << best_mi << " deg";
        if (best_comm > 2.0 || best_mi > 2.0) ok = false;
    }

    const double secs = timer.seconds();
    if (secs >= 900.0) ok = false;
    report(7, "trend reproduction", ok, detail.str(), secs);
}

// --- criterion 8: byte-identical sweeps --------------------------------------

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_8() {
    Timer timer;
    ExperimentConfig config;
    config.scenario = scenario(4, 2, 4, 2, 2, 810);
    config.sweep.kind = SweepSpec::Kind::threshold;
    config.sweep.values = {0.5, 1.0};
    config.algorithms = {Algorithm::comm_opt, Algorithm::mi_opt, Algorithm::alg1,
                         Algorithm::alg2};
    config.scenario.subcarrier_offset = 1;
    config.n_monte_carlo = 4;

    config.output_path = "acceptance_det_a.csv";
    run_sweep(config);
    config.output_path = "acceptance_det_b.csv";
    run_sweep(config);
    config.output_path = "acceptance_det_c.csv";
    config.n_threads = 3;
    run_sweep(config);

    const std::string a = slurp("acceptance_det_a.csv");
    const std::string b = slurp("acceptance_det_b.csv");
    const std::string c = slurp("acceptance_det_c.csv");
    std::remove("acceptance_det_a.csv");
    std::remove("acceptance_det_b.csv");
    std::remove("acceptance_det_c.csv");

    const bool ok = !a.empty() && a == b && a == c;
    report(8, "byte-identical sweeps", ok,
           ok ? "rerun and 3-thread run identical" : "outputs differ", timer.seconds());
}

}  // namespace

int main() {
    std::printf("jcaswave acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (g_failures == 0)
        std::printf("all 8 criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", g_failures);
    return g_failures;
}
