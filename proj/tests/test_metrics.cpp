#include <doctest.h>

#include <cmath>

#include "jcaswave/channel.hpp"
#include "jcaswave/metrics.hpp"
#include "jcaswave/oracle.hpp"
#include "jcaswave/rng.hpp"

using namespace jcaswave;

namespace {

ScenarioConfig base_config(int n, int u, int k, std::uint64_t seed) {
    ScenarioConfig sc;
    sc.n_antennas = n;
    sc.n_users = u;
    sc.n_subcarriers = k;
    sc.n_targets = 2;
    sc.n_paths_per_user = 2;
    sc.rng_seed = seed;
    return sc;
}

PrecoderSet random_unit_precoder(const ScenarioConfig& sc, std::uint64_t seed) {
    PrecoderSet prec;
    for (int k = 0; k < sc.n_subcarriers; ++k) {
        Eigen::MatrixXcd pk(sc.n_antennas, sc.n_users);
        for (int u = 0; u < sc.n_users; ++u) {
            StreamRng rng(seed, 50 + k, u);
            for (int i = 0; i < sc.n_antennas; ++i) pk(i, u) = rng.complex_gaussian();
            pk.col(u).normalize();
        }
        prec.p.push_back(pk);
    }
    return prec;
}

}  // namespace

TEST_CASE("power budget check") {
    const ScenarioConfig sc = base_config(4, 2, 2, 3);
    PrecoderSet prec = random_unit_precoder(sc, 4);
    CHECK_NOTHROW(prec.check_power());
    prec.p[0] *= 1.5;
    CHECK_THROWS_AS(prec.check_power(), std::invalid_argument);
}

TEST_CASE("single user has no interference") {
    const ScenarioConfig sc = base_config(4, 1, 3, 5);
    auto [comm, scene] = draw_scenario(sc);
    (void)scene;
    const PrecoderSet prec = random_unit_precoder(sc, 6);
    CHECK(mui(comm, prec).total == 0.0);
}

TEST_CASE("zero forcing nulls the interference") {
    const ScenarioConfig sc = base_config(4, 2, 3, 7);
    auto [comm, scene] = draw_scenario(sc);
    (void)scene;
    const PrecoderSet zf = zero_forcing_precoder(comm);
    zf.check_power();
    CHECK(mui(comm, zf).total < 1e-10);
}

TEST_CASE("MUI dual forms and the brute-force loop agree") {
    for (int t = 0; t < 50; ++t) {
        const ScenarioConfig sc = base_config(4, 2, 2, 100 + t);
        auto [comm, scene] = draw_scenario(sc);
        (void)scene;
        const PrecoderSet prec = random_unit_precoder(sc, 200 + t);
        const double main = mui(comm, prec).total;
        CHECK(std::abs(main - oracle::mui_offdiag_frobenius(comm, prec)) <=
              1e-10 * std::max(1.0, main));
        CHECK(std::abs(main - oracle::mui_loops(comm, prec)) <= 1e-10 * std::max(1.0, main));
    }
}

TEST_CASE("ECG edge cases and oracle agreement") {
    const ScenarioConfig sc = base_config(4, 1, 1, 9);
    auto [comm, scene] = draw_scenario(sc);
    (void)scene;

    // Orthogonal column: zero gain.
    Eigen::VectorXcd h = comm.h[0].col(0);
    Eigen::VectorXcd orth = Eigen::VectorXcd::Zero(sc.n_antennas);
    orth(0) = -std::conj(h(1));
    orth(1) = std::conj(h(0));
    orth.normalize();
    PrecoderSet prec;
    prec.p.push_back(orth);
    CHECK(ecg(comm, prec).total < 1e-20);

    // Matched filter: squared channel norm.
    prec.p[0] = h.normalized();
    CHECK(ecg(comm, prec).total == doctest::Approx(h.squaredNorm()).epsilon(1e-12));

    for (int t = 0; t < 30; ++t) {
        const ScenarioConfig sc2 = base_config(4, 2, 2, 300 + t);
        auto [comm2, scene2] = draw_scenario(sc2);
        (void)scene2;
        const PrecoderSet p2 = random_unit_precoder(sc2, 400 + t);
        const double main = ecg(comm2, p2).total;
        CHECK(std::abs(main - oracle::ecg_loops(comm2, p2)) <= 1e-10 * std::max(1.0, main));
    }
}

TEST_CASE("R_u structure: single user and identity against the metrics") {
    {
        const ScenarioConfig sc = base_config(4, 1, 1, 11);
        auto [comm, scene] = draw_scenario(sc);
        (void)scene;
        const RuSet ru = build_ru(comm, sc.mui_weight);
        const Eigen::VectorXcd h = comm.h[0].col(0);
        CHECK((ru[0][0] + h * h.adjoint()).norm() < 1e-12 * h.squaredNorm());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ru[0][0]);
        CHECK(es.eigenvalues()(0) == doctest::Approx(-h.squaredNorm()).epsilon(1e-10));
        for (int i = 1; i < es.eigenvalues().size(); ++i)
            CHECK(std::abs(es.eigenvalues()(i)) < 1e-12 * h.squaredNorm());
    }
    {
        // -p^H R_u p equals S - mu I for random unit vectors.
        const ScenarioConfig sc = base_config(4, 2, 1, 13);
        auto [comm, scene] = draw_scenario(sc);
        (void)scene;
        const RuSet ru = build_ru(comm, sc.mui_weight);
        for (int t = 0; t < 100; ++t) {
            PrecoderSet prec = random_unit_precoder(sc, 500 + t);
            const MetricField gain = ecg(comm, prec);
            const MetricField interference = mui(comm, prec);
            for (int u = 0; u < sc.n_users; ++u) {
                const Eigen::VectorXcd pu = prec.p[0].col(u);
                const double quad = -std::real(pu.dot(ru[0][u] * pu));
                const double expect = gain.per(0, u) - sc.mui_weight * interference.per(0, u);
                CHECK(std::abs(quad - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
            }
        }
    }
}

TEST_CASE("J metric dual routes: zero forcing and zero precoder") {
    const ScenarioConfig sc = base_config(4, 2, 2, 17);
    auto [comm, scene] = draw_scenario(sc);
    (void)scene;

    const PrecoderSet zf = zero_forcing_precoder(comm);
    CHECK(j_metric(comm, zf, sc.mui_weight) ==
          doctest::Approx(ecg(comm, zf).total).epsilon(1e-10));

    PrecoderSet zero;
    for (int k = 0; k < sc.n_subcarriers; ++k)
        zero.p.push_back(Eigen::MatrixXcd::Zero(sc.n_antennas, sc.n_users));
    CHECK(j_metric(comm, zero, sc.mui_weight) == 0.0);

    const RuSet ru = build_ru(comm, sc.mui_weight);
    for (int t = 0; t < 50; ++t) {
        const PrecoderSet prec = random_unit_precoder(sc, 600 + t);
        const double a = j_metric(comm, prec, sc.mui_weight);
        const double b = j_metric_quadratic(ru, prec);
        CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("SINR fixed points") {
    ScenarioConfig sc = base_config(2, 1, 1, 19);
    sc.tx_power = 2.0;
    sc.noise_var_comm = 0.5;
    auto [comm, scene] = draw_scenario(sc);
    (void)scene;

    // Scale the precoder so S = sigma_1^2 U / P exactly; with I = 0 the SINR
    // is 1 and the rate contribution is one bit.
    const Eigen::VectorXcd h = comm.h[0].col(0);
    const double target_gain = sc.noise_var_comm * sc.n_users / sc.tx_power;
    PrecoderSet prec;
    prec.p.push_back(h * (std::sqrt(target_gain) / h.squaredNorm()));
    const SinrReport rep = sinr_and_rate(comm, prec, sc);
    CHECK(rep.sinr(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.sum_rate == doctest::Approx(1.0).epsilon(1e-12));

    PrecoderSet zero;
    zero.p.push_back(Eigen::MatrixXcd::Zero(sc.n_antennas, 1));
    CHECK(sinr_and_rate(comm, zero, sc).sinr(0, 0) == 0.0);
}

TEST_CASE("regulated bound stays below the SINR sum under the side conditions") {
    int accepted = 0;
    for (int t = 0; t < 3000 && accepted < 500; ++t) {
        ScenarioConfig sc = base_config(4, 2, 2, 700 + t);
        sc.noise_var_comm = 1e-3;
        auto [comm, scene] = draw_scenario(sc);
        (void)scene;
        PrecoderSet prec = zero_forcing_precoder(comm);
        StreamRng rng(31, 1, t);
        for (auto& pk : prec.p)
            for (int u = 0; u < pk.cols(); ++u) {
                for (int i = 0; i < pk.rows(); ++i) pk(i, u) += 0.15 * rng.complex_gaussian();
                pk.col(u).normalize();
            }
        if (!sinr_bound_conditions(comm, prec, sc).all_hold) continue;
        ++accepted;
        CHECK(sinr_and_rate(comm, prec, sc).sinr.sum() >=
              j_metric(comm, prec, sc.mui_weight) - 1e-9);
    }
    CHECK(accepted >= 500);
}

TEST_CASE("sensing MI: orthogonal, scalar, and determinant-form agreement") {
    {
        ScenarioConfig sc = base_config(2, 1, 1, 23);
        sc.n_targets = 1;
        const SensingScene scene = synth_sensing_scene(sc, {Target{{1.0, 0.0}, 0.4, 0.0}});
        Eigen::VectorXcd orth(2);
        orth << -std::conj(scene.h_s[0](1)), std::conj(scene.h_s[0](0));
        PrecoderSet prec;
        prec.p.push_back(orth.normalized());
        CHECK(sensing_mi(scene, prec, sc) < 1e-12);
    }
    {
        // Scalar fixed point: h = 1, P = sigma^2 = P[k] = 1 gives one bit.
        ScenarioConfig sc = base_config(1, 1, 1, 29);
        sc.n_targets = 1;
        const SensingScene scene = synth_sensing_scene(sc, {Target{{1.0, 0.0}, 0.0, 0.0}});
        PrecoderSet prec;
        prec.p.push_back(Eigen::MatrixXcd::Ones(1, 1));
        CHECK(sensing_mi(scene, prec, sc) == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (int t = 0; t < 50; ++t) {
        const ScenarioConfig sc = base_config(4, 2, 3, 800 + t);
        auto [comm, scene] = draw_scenario(sc);
        (void)comm;
        const PrecoderSet prec = random_unit_precoder(sc, 900 + t);
        const double a = sensing_mi(scene, prec, sc);
        const double b = oracle::mi_determinant(scene, prec, sc);
        CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
    }
}
