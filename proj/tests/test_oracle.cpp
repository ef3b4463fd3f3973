#include <doctest.h>

#include <cmath>

#include "jcaswave/channel.hpp"
#include "jcaswave/individual.hpp"
#include "jcaswave/metrics.hpp"
#include "jcaswave/oracle.hpp"
#include "jcaswave/rng.hpp"

using namespace jcaswave;

namespace {

ScenarioConfig config_nuk(int n, int u, int k, std::uint64_t seed) {
    ScenarioConfig sc;
    sc.n_antennas = n;
    sc.n_users = u;
    sc.n_subcarriers = k;
    sc.n_targets = 2;
    sc.n_paths_per_user = 2;
    sc.rng_seed = seed;
    return sc;
}

}  // namespace

TEST_CASE("grid spec guards") {
    oracle::GridSpec g;
    g.dims = 5;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g.dims = 2;
    g.step = 1e-9;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g.step = 1e-3;
    CHECK_NOTHROW(g.validate());
}

TEST_CASE("grid search recovers the unconstrained eigen solution") {
    // With a huge rho the feasible set is the power ball and the optimum is
    // the matched filter at full power; the grid must land within a step.
    ScenarioConfig sc = config_nuk(2, 1, 1, 301);
    sc.n_paths_per_user = 2;
    const CommChannel comm = synth_comm_channel(
        sc, {{CommPath{{0.9, 0.0}, 0.0, 0.0}, CommPath{{0.4, 0.0}, M_PI, 0.0}}});
    const SensingScene scene =
        synth_sensing_scene(sc, {Target{{0.7, 0.0}, 0.0, 0.0}, Target{{0.2, 0.0}, M_PI, 0.0}});
    JcasParams params;
    params.rho = 1e3;

    oracle::GridSpec grid;
    grid.dims = 2;
    grid.lo = -1.02;
    grid.hi = 1.02;
    grid.step = 1e-3;
    const auto res = oracle::grid_search_j(comm, scene, sc, params, ConstraintKind::mi, grid);
    const double expect = comm.h[0].col(0).squaredNorm();  // matched filter J
    CHECK(std::abs(res.best_j - expect) <= 4e-3 * expect);
}

TEST_CASE("grid search reports an empty feasible region") {
    ScenarioConfig sc = config_nuk(2, 1, 1, 303);
    const CommChannel comm = synth_comm_channel(
        sc, {{CommPath{{1.0, 0.0}, 0.0, 0.0}, CommPath{{0.3, 0.0}, M_PI, 0.0}}});
    const SensingScene scene =
        synth_sensing_scene(sc, {Target{{1.0, 0.0}, 0.0, 0.0}, Target{{0.4, 0.0}, M_PI, 0.0}});
    JcasParams params;
    params.rho = 1e-12;  // sphere too small for any grid point

    oracle::GridSpec grid;
    grid.dims = 2;
    grid.lo = -1.0;
    grid.hi = 1.0;
    grid.step = 0.05;
    CHECK_THROWS_AS(oracle::grid_search_j(comm, scene, sc, params, ConstraintKind::mi, grid),
                    std::runtime_error);
}

TEST_CASE("numeric FIM guards the step size") {
    const ScenarioConfig sc = config_nuk(4, 2, 3, 305);
    auto [comm, scene] = draw_scenario(sc);
    (void)comm;
    PrecoderSet prec;
    for (int k = 0; k < sc.n_subcarriers; ++k) {
        Eigen::MatrixXcd pk(sc.n_antennas, sc.n_users);
        StreamRng rng(306, k, 0);
        for (int i = 0; i < pk.size(); ++i) pk.data()[i] = rng.complex_gaussian();
        pk *= std::sqrt(double(sc.n_users)) / pk.norm();
        prec.p.push_back(pk);
    }
    CHECK_THROWS_AS(oracle::numeric_fim(scene, prec, sc, 1e-2), std::invalid_argument);
    CHECK_THROWS_AS(oracle::numeric_fim(scene, prec, sc, 1e-9), std::invalid_argument);
    CHECK_NOTHROW(oracle::numeric_fim(scene, prec, sc, 1e-6));
}

TEST_CASE("numeric FIM scales inversely with sigma") {
    const ScenarioConfig sc = config_nuk(4, 2, 2, 307);
    auto [comm, scene] = draw_scenario(sc);
    (void)comm;
    PrecoderSet prec;
    for (int k = 0; k < sc.n_subcarriers; ++k) {
        Eigen::MatrixXcd pk(sc.n_antennas, sc.n_users);
        StreamRng rng(308, k, 0);
        for (int i = 0; i < pk.size(); ++i) pk.data()[i] = rng.complex_gaussian();
        pk *= std::sqrt(double(sc.n_users)) / pk.norm();
        prec.p.push_back(pk);
    }
    ScenarioConfig doubled = sc;
    doubled.noise_var_radar = 4.0 * sc.noise_var_radar;
    const Eigen::MatrixXd a = oracle::numeric_fim(scene, prec, sc);
    const Eigen::MatrixXd b = oracle::numeric_fim(scene, prec, doubled);
    CHECK(b.norm() / a.norm() == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("dominance oracle rejects losers and passes the true optimum") {
    const ScenarioConfig sc = config_nuk(4, 1, 1, 309);
    auto [comm, scene] = draw_scenario(sc);

    PrecoderSet zero;
    zero.p.push_back(Eigen::MatrixXcd::Zero(sc.n_antennas, 1));
    const auto fail = oracle::random_dominance(zero, comm, scene, sc,
                                               oracle::DominanceMetric::sensing_mi, 1000, 310);
    CHECK_FALSE(fail.pass);

    const MiPrecoderResult mi_star = opt_mi_precoder(scene, comm, sc.mui_weight);
    const auto pass = oracle::random_dominance(mi_star.prec, comm, scene, sc,
                                               oracle::DominanceMetric::sensing_mi, 5000, 311);
    CHECK(pass.pass);

    CHECK_THROWS_AS(oracle::random_dominance(zero, comm, scene, sc,
                                             oracle::DominanceMetric::sensing_mi, 10, 312),
                    std::invalid_argument);
}
