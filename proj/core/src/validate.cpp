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

#include "jcaswave/validate.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "jcaswave/channel.hpp"
#include "jcaswave/individual.hpp"
#include "jcaswave/jcas_opt.hpp"
#include "jcaswave/metrics.hpp"
#include "jcaswave/oracle.hpp"
#include "jcaswave/rng.hpp"

namespace jcaswave {

bool ValidationReport::all_passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

CheckResult check_fim_symmetry(const FimReport& report) {
    const double scale = std::max(report.fim.norm(), 1e-300);
    const double asym = (report.fim - report.fim.transpose()).norm() / scale;
    return {"fim_symmetry", asym <= 1e-9, "relative asymmetry " + std::to_string(asym)};
}

CheckResult check_fim_psd(const FimReport& report) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(report.fim);
    const double min_eig = es.eigenvalues().minCoeff();
    const double bound = -1e-8 * std::max(report.fim.norm(), 1e-300);
    return {"fim_psd", min_eig >= bound,
            "min eigenvalue " + std::to_string(min_eig) + " bound " + std::to_string(bound)};
}

namespace {

struct Suite {
    ValidationReport report;
    std::uint64_t seed;
    bool fast;

    void add(const std::string& name, bool passed, const std::string& detail) {
        report.checks.push_back({name, passed, detail});
    }
    int trials(int fast_n, int full_n) const { return fast ? fast_n : full_n; }
};

ScenarioConfig small_config(std::uint64_t seed) {
    ScenarioConfig sc;
    sc.n_antennas = 4;
    sc.n_users = 2;
    sc.n_subcarriers = 3;
    sc.n_targets = 2;
    sc.n_paths_per_user = 2;
    sc.rng_seed = seed;
    return sc;
}

PrecoderSet random_precoder(const ScenarioConfig& sc, std::uint64_t seed) {
    PrecoderSet prec;
    prec.p.reserve(sc.n_subcarriers);
    for (int k = 0; k < sc.n_subcarriers; ++k) {
        Eigen::MatrixXcd pk(sc.n_antennas, sc.n_users);
        for (int u = 0; u < sc.n_users; ++u) {
            StreamRng rng(seed, 7700 + k, u);
            for (int i = 0; i < sc.n_antennas; ++i) pk(i, u) = rng.complex_gaussian();
            pk.col(u).normalize();
        }
        prec.p.push_back(pk);
    }
    return prec;
}

void check_channel_module(Suite& s) {
    {
        bool ok = true;
        double worst = 0.0;
        for (int t = 0; t < s.trials(50, 200); ++t) {
            StreamRng rng(s.seed, 101, t);
            const int n = 1 + int(rng.uniform() * 16);
            const double omega = rng.uniform(-M_PI, M_PI);
            const double err = std::abs(array_response(omega, n).norm() - 1.0);
            worst = std::max(worst, err);
            ok = ok && err < 1e-12;
        }
        s.add("array_response_unit_norm", ok, "worst |norm-1| = " + std::to_string(worst));
    }
    {
        bool ok = true;
        double worst = 0.0;
        const double h = 1e-6;
        for (int t = 0; t < s.trials(30, 100); ++t) {
            StreamRng rng(s.seed, 102, t);
            const int n = 2 + int(rng.uniform() * 10);
            const double omega = rng.uniform(-M_PI, M_PI);
            const Eigen::VectorXcd fd =
                (array_response(omega + h, n) - array_response(omega - h, n)) / (2.0 * h);
            const Eigen::VectorXcd an = steering_derivative(omega, n);
            const double rel = (fd - an).norm() / std::max(an.norm(), 1e-300);
            worst = std::max(worst, rel);
            ok = ok && rel < 1e-6;
        }
        s.add("steering_derivative_fd", ok, "worst relative error " + std::to_string(worst));
    }
    {
        // Dual-form equality is enforced inside synthesis; any disagreement throws.
        bool ok = true;
        std::string detail = "factorized and summed sensing channels agree";
        try {
            for (int t = 0; t < s.trials(10, 50); ++t) {
                ScenarioConfig sc = small_config(mix_seed(s.seed, 200 + t));
                draw_scenario(sc);
            }
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        s.add("sensing_dual_form", ok, detail);
    }
    {
        bool ok = true;
        double worst = 0.0;
        for (int t = 0; t < s.trials(10, 40); ++t) {
            ScenarioConfig sc = small_config(mix_seed(s.seed, 300 + t));
            auto [comm, scene] = draw_scenario(sc);
            auto paths_b = comm.paths;
            for (auto& user : paths_b)
                for (auto& p : user) p.gain = StreamRng(s.seed, 301, t).complex_gaussian();
            auto paths_sum = comm.paths;
            for (std::size_t uu = 0; uu < paths_sum.size(); ++uu)
                for (std::size_t ll = 0; ll < paths_sum[uu].size(); ++ll)
                    paths_sum[uu][ll].gain += paths_b[uu][ll].gain;
            const CommChannel cb = synth_comm_channel(sc, paths_b);
            const CommChannel cs = synth_comm_channel(sc, paths_sum);
            for (int k = 0; k < sc.n_subcarriers; ++k) {
                const double err = (cs.h[k] - (comm.h[k] + cb.h[k])).norm() /
                                   std::max(cs.h[k].norm(), 1e-300);
                worst = std::max(worst, err);
                ok = ok && err < 1e-12;
            }
        }
        s.add("channel_gain_linearity", ok, "worst relative error " + std::to_string(worst));
    }
    {
        ScenarioConfig sc = small_config(s.seed);
        auto [c1, sc1] = draw_scenario(sc);
        auto [c2, sc2] = draw_scenario(sc);
        bool same = true;
        for (int k = 0; k < sc.n_subcarriers; ++k)
            same = same && c1.h[k] == c2.h[k] && sc1.h_s[k] == sc2.h_s[k];
        sc.rng_seed = mix_seed(s.seed, 12345);
        auto [c3, sc3] = draw_scenario(sc);
        const bool differs = (c1.h[0] - c3.h[0]).norm() > 1e-12;
        s.add("draw_determinism", same && differs,
              same ? "re-draws identical, new seed differs" : "re-draw mismatch");
    }
    if (!s.fast) {
        const int n = 100000;
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            acc += std::norm(StreamRng(s.seed, 401, i).complex_gaussian());
        const double mean = acc / n;
        s.add("gain_second_moment", std::abs(mean - 1.0) <= 0.02,
              "mean |beta|^2 = " + std::to_string(mean));
    }
}

void check_metrics_module(Suite& s) {
    double worst_mui = 0.0, worst_j = 0.0, worst_mi = 0.0;
    bool ok_mui = true, ok_j = true, ok_mi = true;
    for (int t = 0; t < s.trials(100, 1000); ++t) {
        ScenarioConfig sc = small_config(mix_seed(s.seed, 500 + t));
        auto [comm, scene] = draw_scenario(sc);
        const PrecoderSet prec = random_precoder(sc, mix_seed(s.seed, 600 + t));

        const double mui_main = mui(comm, prec).total;
        const double mui_alt = oracle::mui_offdiag_frobenius(comm, prec);
        const double e_mui = std::abs(mui_main - mui_alt) / std::max(std::abs(mui_main), 1e-300);
        worst_mui = std::max(worst_mui, e_mui);
        ok_mui = ok_mui && e_mui <= 1e-10;

        const double j_diff = j_metric(comm, prec, sc.mui_weight);
        const double j_quad = j_metric_quadratic(build_ru(comm, sc.mui_weight), prec);
        const double e_j = std::abs(j_diff - j_quad) / std::max(std::abs(j_diff), 1e-30);
        worst_j = std::max(worst_j, e_j);
        ok_j = ok_j && e_j <= 1e-10;

        const double mi_main = sensing_mi(scene, prec, sc);
        const double mi_det = oracle::mi_determinant(scene, prec, sc);
        const double e_mi = std::abs(mi_main - mi_det) / std::max(std::abs(mi_main), 1e-30);
        worst_mi = std::max(worst_mi, e_mi);
        ok_mi = ok_mi && e_mi <= 1e-9;
    }
    s.add("mui_dual_form", ok_mui, "worst relative gap " + std::to_string(worst_mui));
    s.add("j_dual_route", ok_j, "worst relative gap " + std::to_string(worst_j));
    s.add("mi_dual_form", ok_mi, "worst relative gap " + std::to_string(worst_mi));

    {
        // Regulated bound under the SINR sum whenever the side conditions hold.
        const int wanted = s.trials(1000, 10000);
        int accepted = 0;
        int violations = 0;
        int attempt = 0;
        while (accepted < wanted && attempt < wanted * 20) {
            ScenarioConfig sc = small_config(mix_seed(s.seed, 700 + attempt));
            sc.noise_var_comm = 1e-3;
            auto [comm, scene] = draw_scenario(sc);
            (void)scene;
            PrecoderSet prec = zero_forcing_precoder(comm);
            StreamRng rng(s.seed, 701, attempt);
            for (auto& pk : prec.p) {
                for (int u = 0; u < pk.cols(); ++u) {
                    for (int i = 0; i < pk.rows(); ++i)
                        pk(i, u) += 0.15 * rng.complex_gaussian();
                    pk.col(u).normalize();
                }
            }
            ++attempt;
            if (!sinr_bound_conditions(comm, prec, sc).all_hold) continue;
            ++accepted;
            const double sinr_sum = sinr_and_rate(comm, prec, sc).sinr.sum();
            const double j = j_metric(comm, prec, sc.mui_weight);
            if (sinr_sum < j - 1e-9) ++violations;
        }
        std::ostringstream detail;
        detail << accepted << " accepted draws, " << violations << " violations";
        s.add("sinr_bound_theorem", accepted >= wanted && violations == 0, detail.str());
    }

    {
        bool ok = true;
        std::string detail = "Hermitian, at most one negative eigenvalue";
        for (int t = 0; t < s.trials(20, 100) && ok; ++t) {
            ScenarioConfig sc = small_config(mix_seed(s.seed, 800 + t));
            auto [comm, scene] = draw_scenario(sc);
            (void)scene;
            for (const auto& per_k : build_ru(comm, sc.mui_weight)) {
                for (const auto& r : per_k) {
                    if ((r - r.adjoint()).norm() > 1e-12 * std::max(r.norm(), 1e-300)) {
                        ok = false;
                        detail = "R_u not Hermitian";
                        break;
                    }
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
                    int negatives = 0;
                    for (int i = 0; i < es.eigenvalues().size(); ++i)
                        if (es.eigenvalues()(i) < -1e-12 * std::max(r.norm(), 1e-300)) ++negatives;
                    if (negatives > 1) {
                        ok = false;
                        detail = "R_u with " + std::to_string(negatives) + " negative eigenvalues";
                        break;
                    }
                }
            }
        }
        s.add("ru_negative_eigenvalue_count", ok, detail);
    }
}

void check_fim_module(Suite& s) {
    bool sym_ok = true, psd_ok = true, match_ok = true, scale_ok = true;
    double worst_match = 0.0;
    for (int t = 0; t < s.trials(3, 10); ++t) {
        ScenarioConfig sc = small_config(mix_seed(s.seed, 900 + t));
        sc.n_subcarriers = 4;
        auto [comm, scene] = draw_scenario(sc);
        (void)comm;
        const PrecoderSet prec = random_precoder(sc, mix_seed(s.seed, 901 + t));
        const FimReport rep = fim(scene, prec, sc);
        sym_ok = sym_ok && check_fim_symmetry(rep).passed;
        psd_ok = psd_ok && check_fim_psd(rep).passed;

        const Eigen::MatrixXd numeric = oracle::numeric_fim(scene, prec, sc);
        const double rel = (rep.fim - numeric).norm() / std::max(numeric.norm(), 1e-300);
        worst_match = std::max(worst_match, rel);
        match_ok = match_ok && rel < 1e-4;

        ScenarioConfig sc2 = sc;
        sc2.noise_var_radar = 4.0 * sc.noise_var_radar;  // sigma doubles
        const FimReport rep2 = fim(scene, prec, sc2);
        const double ratio = rep2.fim.norm() / std::max(rep.fim.norm(), 1e-300);
        scale_ok = scale_ok && std::abs(ratio - 0.5) < 1e-9;
    }
    s.add("fim_symmetry", sym_ok, "assembled matrix symmetric to 1e-9");
    s.add("fim_psd", psd_ok, "assembled matrix PSD within tolerance");
    s.add("fim_numeric_match", match_ok,
          "worst relative error vs finite differences " + std::to_string(worst_match));
    s.add("fim_sigma_scaling", scale_ok, "doubling sigma halves every subblock");
}

void check_jcas_module(Suite& s) {
    {
        bool ok = true;
        double worst = 0.0;
        for (int t = 0; t < s.trials(50, 200); ++t) {
            StreamRng rng(s.seed, 1000, t);
            const int n = 2 + int(rng.uniform() * 5);
            Eigen::VectorXcd p(n);
            Eigen::MatrixXcd r(n, n);
            for (int i = 0; i < n; ++i) {
                p(i) = rng.complex_gaussian();
                for (int j = 0; j < n; ++j) r(i, j) = rng.complex_gaussian();
            }
            r = (r + r.adjoint()).eval();
            const RealifiedProblem rp = realify(p, r);
            const double direct = std::real(p.dot(r * p));
            const double mapped = rp.p_bar.dot(rp.r_bar * rp.p_bar);
            const double err = std::abs(direct - mapped) / std::max(std::abs(direct), 1e-30);
            worst = std::max(worst, err);
            ok = ok && err <= 1e-12;
        }
        s.add("realify_identity", ok, "worst relative error " + std::to_string(worst));
    }
    {
        bool ok = true;
        std::string detail = "monotone -J, feasible iterates";
        for (int t = 0; t < s.trials(3, 10) && ok; ++t) {
            ScenarioConfig sc = small_config(mix_seed(s.seed, 1100 + t));
            sc.n_subcarriers = 2;
            auto [comm, scene] = draw_scenario(sc);
            JcasParams params;
            params.record_steps = true;
            params.use_closed_form = false;
            params.max_iters = 3000;
            for (const ConstraintKind kind : {ConstraintKind::mi, ConstraintKind::crb}) {
                const JcasResult res = kind == ConstraintKind::mi
                                           ? optimize_mi_constrained(comm, scene, sc, params)
                                           : optimize_crb_constrained(comm, scene, sc, params);
                for (const auto& trace : res.trace.per_k) {
                    double prev = std::numeric_limits<double>::infinity();
                    for (const auto& rec : trace.records) {
                        if (rec.neg_j > prev + 1e-12) {
                            ok = false;
                            detail = "-J increased along accepted steps";
                        }
                        prev = rec.neg_j;
                    }
                }
                for (const auto& pk : res.prec.p) {
                    if (constraint_psi(pk) > sc.n_users + 1e-8) {
                        ok = false;
                        detail = "power constraint violated at output";
                    }
                }
            }
        }
        s.add("jcas_monotone_feasible", ok, detail);
    }
    {
        ScenarioConfig sc = small_config(mix_seed(s.seed, 1200));
        sc.n_subcarriers = 2;
        auto [comm, scene] = draw_scenario(sc);
        JcasParams params;
        const JcasResult a = optimize_mi_constrained(comm, scene, sc, params);
        const JcasResult b = optimize_mi_constrained(comm, scene, sc, params);
        bool same = true;
        for (int k = 0; k < comm.n_subcarriers(); ++k) same = same && a.prec.p[k] == b.prec.p[k];
        s.add("jcas_rerun_determinism", same, same ? "bit-identical rerun" : "outputs differ");
    }
}

void check_individual_module(Suite& s) {
    ScenarioConfig sc = small_config(mix_seed(s.seed, 1300));
    auto [comm, scene] = draw_scenario(sc);

    {
        bool ok = true;
        std::string detail = "rank-one, aligned with the sensing channel";
        const MiPrecoderResult res = opt_mi_precoder(scene, comm, sc.mui_weight);
        res.prec.check_power();
        for (int k = 0; k < sc.n_subcarriers; ++k) {
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(res.prec.p[k], Eigen::ComputeThinU);
            if (svd.singularValues().size() > 1 &&
                svd.singularValues()(1) > 1e-10 * svd.singularValues()(0)) {
                ok = false;
                detail = "precoder not rank one";
            }
            const Eigen::VectorXcd dir = scene.h_s[k].normalized();
            const double align = std::abs(svd.matrixU().col(0).dot(dir));
            if (std::abs(align - 1.0) > 1e-9) {
                ok = false;
                detail = "left singular direction off the sensing channel";
            }
        }
        s.add("mi_precoder_rank_one", ok, detail);
    }
    {
        const int trials = s.trials(1000, 5000);
        const MiPrecoderResult mi_res = opt_mi_precoder(scene, comm, sc.mui_weight);
        const auto dom_mi = oracle::random_dominance(mi_res.prec, comm, scene, sc,
                                                     oracle::DominanceMetric::sensing_mi, trials,
                                                     mix_seed(s.seed, 1400));
        s.add("mi_dominance", dom_mi.pass,
              "worst margin " + std::to_string(dom_mi.worst_gap) + " over " +
                  std::to_string(trials) + " samples");

        const PrecoderSet comm_prec = opt_comm_precoder(comm, sc.mui_weight);
        comm_prec.check_power();
        const auto dom_j = oracle::random_dominance(comm_prec, comm, scene, sc,
                                                    oracle::DominanceMetric::j_bound, trials,
                                                    mix_seed(s.seed, 1500));
        s.add("j_dominance", dom_j.pass,
              "worst margin " + std::to_string(dom_j.worst_gap) + " over " +
                  std::to_string(trials) + " samples");
    }
    {
        ScenarioConfig sc_k = sc;
        sc_k.subcarrier_offset = 1;
        sc_k.n_subcarriers = 2;
        auto [comm_k, scene_k] = draw_scenario(sc_k);
        (void)comm_k;
        const CrbCovariance crb = opt_crb_covariance(scene_k, sc_k);
        bool ok = crb.converged;
        std::string detail = "feasible and converged";
        for (const auto& q : crb.q) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(q);
            if (es.eigenvalues().minCoeff() < -1e-9 ||
                q.real().trace() > sc_k.n_users + 1e-9) {
                ok = false;
                detail = "covariance iterate infeasible";
            }
        }
        s.add("crb_covariance_feasible", ok, detail);
    }
}

}  // namespace

ValidationReport validate(ValidateLevel level, std::uint64_t seed) {
    Suite s{{}, seed, level == ValidateLevel::fast};
    check_channel_module(s);
    check_metrics_module(s);
    check_fim_module(s);
    check_jcas_module(s);
    check_individual_module(s);
    return s.report;
}

}  // namespace jcaswave
