// Copyright 2026 The lda-particles Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lda/errors.hpp"

namespace lda {

/// Anything that hands out independent uniforms on (0, 1].
template <class S>
concept UniformSource = requires(S& s) {
  { s.uniform() } -> std::convertible_to<double>;
};

/// splitmix64 finalizer; used to derive substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31U);
}

/// Deterministic seed for the substream addressed by `path` under `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(seed);
  for (auto p : path) {
    h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  }
  return h;
}

/// Pseudo-random uniform stream. The uniform transform is hand-rolled (53-bit
/// mantissa, shifted onto (0,1]) so values do not depend on the standard
/// library's distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for (seed, path...). Same inputs give the same stream.
  static RandomStream substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    return RandomStream(derive_seed(seed, path));
  }

  double uniform() noexcept {
    return static_cast<double>((engine_() >> 11U) + 1U) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

/// Replays a fixed sequence of uniforms; throws StreamError once exhausted.
class ScriptedStream {
 public:
  ScriptedStream(std::initializer_list<double> values) : values_(values) {}
  explicit ScriptedStream(std::vector<double> values) : values_(std::move(values)) {}

  double uniform() {
    if (next_ >= values_.size()) {
      throw StreamError("scripted uniform stream exhausted after " + std::to_string(values_.size()) +
                        " draws");
    }
    return values_[next_++];
  }

  [[nodiscard]] std::size_t consumed() const noexcept { return next_; }

 private:
  std::vector<double> values_;
  std::size_t next_ = 0;
};

/// Box-Muller (cosine branch): sqrt(-2 ln U2) cos(2 pi U1).
template <UniformSource Rng>
double standard_normal(Rng& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u2)) * std::cos(2.0 * std::numbers::pi * u1);
}

/// Marsaglia-Tsang gamma(shape, 1) variate.
template <UniformSource Rng>
double gamma_variate(double shape, Rng& rng) {
  if (shape < 1.0) {
    const double u = rng.uniform();
    return gamma_variate(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z = 0.0;
    double v = 0.0;
    do {
      z = standard_normal(rng);
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) {
      return d * v;
    }
  }
}

template <UniformSource Rng>
double beta_variate(double a, double b, Rng& rng) {
  const double x = gamma_variate(a, rng);
  const double y = gamma_variate(b, rng);
  return x / (x + y);
}

}  // namespace lda
