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

#include "jcaswave/rng.hpp"

#include <cmath>

namespace jcaswave {

namespace {

// splitmix64 finalizer (Vigna); full-avalanche mixing of one 64-bit word.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t kind, std::uint64_t index) {
    std::uint64_t s = mix64(seed);
    s = mix64(s ^ (kind * 0xD6E8FEB86659FD93ULL));
    s = mix64(s ^ (index * 0xA3B195354A39B70DULL));
    state_ = s;
}

std::uint64_t StreamRng::next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double StreamRng::uniform() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double StreamRng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::complex<double> StreamRng::complex_gaussian() {
    // u1 in (0, 1] so the log is finite; |z|^2 ~ Exp(1) gives E|z|^2 = 1.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(a) ^ (b * 0xD6E8FEB86659FD93ULL));
}

}  // namespace jcaswave
