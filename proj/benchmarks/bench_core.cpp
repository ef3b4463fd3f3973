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

#include <benchmark/benchmark.h>

#include "jcaswave/channel.hpp"
#include "jcaswave/fim.hpp"
#include "jcaswave/individual.hpp"
#include "jcaswave/jcas_opt.hpp"
#include "jcaswave/metrics.hpp"

namespace {

using namespace jcaswave;

ScenarioConfig bench_config(int n, int k) {
    ScenarioConfig sc;
    sc.n_antennas = n;
    sc.n_users = 2;
    sc.n_subcarriers = k;
    sc.n_targets = 3;
    sc.n_paths_per_user = 3;
    sc.rng_seed = 99;
    return sc;
}

void ChannelSynthesis(benchmark::State& state) {
    const ScenarioConfig sc = bench_config(int(state.range(0)), 32);
    auto [comm, scene] = draw_scenario(sc);
    for (auto _ : state) {
        const CommChannel c = synth_comm_channel(sc, comm.paths);
        benchmark::DoNotOptimize(c.h.front()(0, 0));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(ChannelSynthesis)->RangeMultiplier(2)->Range(4, 64)->Complexity();

void CommMetrics(benchmark::State& state) {
    const ScenarioConfig sc = bench_config(int(state.range(0)), 32);
    auto [comm, scene] = draw_scenario(sc);
    const PrecoderSet prec = zero_forcing_precoder(comm);
    for (auto _ : state) {
        benchmark::DoNotOptimize(j_metric(comm, prec, sc.mui_weight));
        benchmark::DoNotOptimize(sinr_and_rate(comm, prec, sc).sum_rate);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(CommMetrics)->RangeMultiplier(2)->Range(4, 64)->Complexity();

void FimAssembly(benchmark::State& state) {
    const ScenarioConfig sc = bench_config(8, int(state.range(0)));
    auto [comm, scene] = draw_scenario(sc);
    const PrecoderSet prec = zero_forcing_precoder(comm);
    for (auto _ : state) {
        const FimReport rep = fim(scene, prec, sc);
        benchmark::DoNotOptimize(rep.fim(0, 0));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(FimAssembly)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void MiConstrainedSolve(benchmark::State& state) {
    const ScenarioConfig sc = bench_config(int(state.range(0)), 4);
    auto [comm, scene] = draw_scenario(sc);
    JcasParams params;
    params.use_closed_form = false;
    params.max_iters = 300;
    for (auto _ : state) {
        const JcasResult res = optimize_mi_constrained(comm, scene, sc, params);
        benchmark::DoNotOptimize(res.trace.total_sweeps());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(MiConstrainedSolve)->RangeMultiplier(2)->Range(4, 32)->Complexity();

void CrbCovarianceAscent(benchmark::State& state) {
    ScenarioConfig sc = bench_config(int(state.range(0)), 2);
    sc.subcarrier_offset = 1;
    auto [comm, scene] = draw_scenario(sc);
    for (auto _ : state) {
        const CrbCovariance res = opt_crb_covariance(scene, sc);
        benchmark::DoNotOptimize(res.t.front());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(CrbCovarianceAscent)->RangeMultiplier(2)->Range(4, 16)->Complexity();

}  // namespace

BENCHMARK_MAIN();
