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

#ifndef JCASWAVE_RNG_HPP
#define JCASWAVE_RNG_HPP

#include <complex>
#include <cstdint>

namespace jcaswave {

/// Splittable deterministic RNG stream.
///
/// Each stream is keyed by (seed, kind, index), so every drawn quantity has
/// its own substream and results cannot depend on evaluation or thread
/// order. The generator is a splitmix64 walk; all distributions are derived
/// from the raw 64-bit output only, keeping draws bit-identical across
/// platforms and standard libraries.
class StreamRng {
  public:
    StreamRng(std::uint64_t seed, std::uint64_t kind, std::uint64_t index);

    std::uint64_t next_u64();

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform();

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);

    /// Circularly-symmetric complex Gaussian, E|z|^2 = 1 (Box-Muller).
    std::complex<double> complex_gaussian();

  private:
    std::uint64_t state_;
};

/// Deterministic combination of two 64-bit values, used to derive per-draw
/// seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace jcaswave

#endif  // JCASWAVE_RNG_HPP
