#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "jcaswave/experiment.hpp"
#include "jcaswave/validate.hpp"

using namespace jcaswave;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig tiny_experiment(const std::string& out) {
    ExperimentConfig config;
    config.scenario.n_antennas = 4;
    config.scenario.n_users = 2;
    config.scenario.n_subcarriers = 2;
    config.scenario.n_targets = 2;
    config.scenario.n_paths_per_user = 2;
    config.scenario.rng_seed = 7;
    config.sweep.kind = SweepSpec::Kind::snr;
    config.sweep.values = {0.0};
    config.algorithms = {Algorithm::comm_opt};
    config.n_monte_carlo = 1;
    config.output_path = out;
    return config;
}

}  // namespace

TEST_CASE("config parser accepts the documented keys and rejects others") {
    const char* text = R"(
# comment
[scenario]
n_antennas = 8
n_users = 2
n_subcarriers = 16
mui_weight = 5.0
rng_seed = 42
[sweep]
kind = threshold
values = 0.5 1.0 1.5
[experiment]
algorithms = comm_opt alg1
n_monte_carlo = 3
output_path = out.csv
[jcas]
rho = 1.25
epsilon = 0.05
)";
    const ExperimentConfig config = parse_config_text(text);
    CHECK(config.scenario.n_antennas == 8);
    CHECK(config.scenario.rng_seed == 42);
    CHECK(config.sweep.kind == SweepSpec::Kind::threshold);
    CHECK(config.sweep.values.size() == 3);
    CHECK(config.algorithms.size() == 2);
    CHECK(config.jcas.rho == doctest::Approx(1.25));

    CHECK_THROWS_AS(parse_config_text("[scenario]\nbogus_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[bogus]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("orphan = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[scenario]\nn_antennas = elephant\n"), ConfigError);
}

TEST_CASE("explicit path and target lists are parsed") {
    const char* text = R"(
[scenario]
n_antennas = 2
n_users = 1
n_subcarriers = 1
n_targets = 1
n_paths_per_user = 1
[sweep]
kind = snr
values = 0
[comm_paths]
path = 0 1.0 0.0 0.3 0.00002
[targets]
target = 0.5 -0.5 -0.7 0.00001
)";
    const ExperimentConfig config = parse_config_text(text);
    REQUIRE(config.explicit_paths.has_value());
    REQUIRE(config.explicit_targets.has_value());
    CHECK(config.explicit_paths->size() == 1);
    CHECK((*config.explicit_paths)[0][0].equiv_aod == doctest::Approx(0.3));
    CHECK((*config.explicit_targets)[0].gain.imag() == doctest::Approx(-0.5));
    config.validate();
}

TEST_CASE("sweep emits the documented schema with aggregates") {
    const std::string out = "test_sweep_schema.csv";
    ExperimentConfig config = tiny_experiment(out);
    const SweepResult result = run_sweep(config);
    // One detail row and one aggregate row.
    CHECK(result.rows.size() == 2);
    CHECK(result.rows[0].draw == 0);
    CHECK(result.rows[1].draw == -1);

    const std::string body = slurp(out);
    CHECK(body.find(kSweepCsvHeader) == 0);
    int lines = 0;
    for (const char c : body)
        if (c == '\n') ++lines;
    CHECK(lines == 3);  // header + detail + aggregate
    std::remove(out.c_str());
}

TEST_CASE("identical config and seed give byte-identical CSV across thread counts") {
    ExperimentConfig config = tiny_experiment("test_sweep_a.csv");
    config.algorithms = {Algorithm::comm_opt, Algorithm::alg1};
    config.sweep.values = {0.0, 10.0};
    config.n_monte_carlo = 3;
    run_sweep(config);
    const std::string a = slurp("test_sweep_a.csv");

    config.output_path = "test_sweep_b.csv";
    run_sweep(config);
    const std::string b = slurp("test_sweep_b.csv");
    CHECK(a == b);

    config.output_path = "test_sweep_c.csv";
    config.n_threads = 4;
    run_sweep(config);
    const std::string c = slurp("test_sweep_c.csv");
    CHECK(a == c);

    std::remove("test_sweep_a.csv");
    std::remove("test_sweep_b.csv");
    std::remove("test_sweep_c.csv");
}

TEST_CASE("beam pattern peaks where the precoder steers") {
    const int n = 8;
    std::vector<double> angles;
    for (double a = -90.0; a <= 90.0; a += 0.5) angles.push_back(a);

    // Matched steering: peak at the steered angle.
    const double steer_deg = 25.0;
    const Eigen::VectorXcd a_vec = array_response(M_PI * std::sin(steer_deg * M_PI / 180.0), n);
    const BeamPattern matched = beam_pattern(a_vec, angles);
    const auto peaks = pattern_peaks(matched);
    REQUIRE(!peaks.empty());
    CHECK(std::abs(matched.angles_deg[peaks[0]] - steer_deg) <= 1.0);
    CHECK(matched.total_db(peaks[0]) == doctest::Approx(0.0));

    // Uniform weights: peak at broadside.
    const Eigen::VectorXcd uniform = Eigen::VectorXcd::Ones(n) / std::sqrt(double(n));
    const BeamPattern broadside = beam_pattern(uniform, angles);
    const auto peaks2 = pattern_peaks(broadside);
    REQUIRE(!peaks2.empty());
    CHECK(std::abs(broadside.angles_deg[peaks2[0]]) <= 0.5);

    CHECK_THROWS_AS(beam_pattern(uniform, {100.0}), std::invalid_argument);
}

TEST_CASE("validate fixture: corrupted FIM trips the named invariant") {
    FimReport rep;
    rep.fim = Eigen::MatrixXd::Identity(4, 4);
    rep.fim(0, 1) = 0.5;  // symmetric no more
    const CheckResult sym = check_fim_symmetry(rep);
    CHECK(sym.name == "fim_symmetry");
    CHECK_FALSE(sym.passed);

    rep.fim = -Eigen::MatrixXd::Identity(4, 4);  // sign corruption
    const CheckResult psd = check_fim_psd(rep);
    CHECK(psd.name == "fim_psd");
    CHECK_FALSE(psd.passed);
}

TEST_CASE("fast validation suite passes") {
    const ValidationReport report = validate(ValidateLevel::fast, 1);
    for (const auto& check : report.checks) {
        INFO(check.name, ": ", check.detail);
        CHECK(check.passed);
    }
}
