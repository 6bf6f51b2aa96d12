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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/binomial.hpp>

#include "lda/errors.hpp"
#include "lda/frequency.hpp"
#include "lda/parallel.hpp"
#include "lda/random.hpp"
#include "lda/severity.hpp"

namespace lda {

/// Annual loss Z = X_1 + ... + X_N.
struct CompoundModel {
  FrequencyModel frequency;
  SeverityModel severity;

  [[nodiscard]] double mean() const { return frequency.mean() * severity.mean(); }

  [[nodiscard]] std::string describe() const {
    return frequency.describe() + "*" + severity.describe();
  }

  /// FNV-1a of the canonical description, as 16 hex digits.
  [[nodiscard]] std::string hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : describe()) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

struct SampleBatch {
  std::vector<double> values;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t count() const noexcept { return values.size(); }
};

/// One annual loss.
template <UniformSource Rng>
double sample_compound(const CompoundModel& model, Rng& rng) {
  const int n = model.frequency.sample(rng);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    z += model.severity.sample(rng);
  }
  return z;
}

/// T draws from a single stream.
template <UniformSource Rng>
SampleBatch simulate_compound(const CompoundModel& model, std::size_t T, Rng& rng) {
  if (T == 0) {
    throw DomainError("simulate_compound: T must be >= 1");
  }
  SampleBatch batch;
  batch.values.resize(T);
  for (auto& v : batch.values) {
    v = sample_compound(model, rng);
  }
  return batch;
}

/// Draws per chunk when chunking does not follow the thread count.
inline constexpr std::size_t kMcChunk = std::size_t{1} << 16;

/// T draws cut into chunks; chunk c uses substream (seed, c) and lands at a
/// fixed offset, so the batch depends only on (model, T, seed, chunking).
inline SampleBatch simulate_compound(const CompoundModel& model, std::size_t T, std::uint64_t seed,
                                     const ExecutionPolicy& policy = {}) {
  if (T == 0) {
    throw DomainError("simulate_compound: T must be >= 1");
  }
  SampleBatch batch;
  batch.seed = seed;
  batch.values.resize(T);
  const std::size_t chunks =
      policy.deterministic_reduction
          ? (T + kMcChunk - 1) / kMcChunk
          : std::min<std::size_t>(T, static_cast<std::size_t>(std::max(1, policy.threads)));
  const std::size_t per = (T + chunks - 1) / chunks;
  parallel_for(chunks, policy.threads, [&](std::size_t c) {
    auto rng = RandomStream::substream(seed, {c});
    const std::size_t end = std::min(T, (c + 1) * per);
    for (std::size_t t = c * per; t < end; ++t) {
      batch.values[t] = sample_compound(model, rng);
    }
  });
  return batch;
}

struct QuantileEstimate {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Sorted copy of a batch; answers many quantile queries after one sort.
class SortedSample {
 public:
  explicit SortedSample(std::vector<double> values) : xs_(std::move(values)) {
    if (xs_.empty()) {
      throw StateError("empirical quantile: batch is empty");
    }
    std::sort(xs_.begin(), xs_.end());
  }

  [[nodiscard]] std::size_t size() const noexcept { return xs_.size(); }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return xs_; }

  /// inf{x : F_T(x) >= alpha}: the ceil(alpha T)-th order statistic.
  [[nodiscard]] double quantile(double alpha) const {
    check_level(alpha, "alpha");
    return xs_[rank(alpha) - 1];
  }

  /// Point estimate with a distribution-free order-statistic interval: the
  /// ranks are binomial(T, alpha) quantiles at (1 - level)/2 on each side.
  [[nodiscard]] QuantileEstimate quantile_ci(double alpha, double level) const {
    check_level(alpha, "alpha");
    check_level(level, "level");
    const auto n = static_cast<double>(xs_.size());
    const boost::math::binomial_distribution<double> bin(n, alpha);
    const double tail = 0.5 * (1.0 - level);
    auto lo_rank = static_cast<std::size_t>(boost::math::quantile(bin, tail));
    auto hi_rank = static_cast<std::size_t>(boost::math::quantile(boost::math::complement(bin, tail))) + 1;
    lo_rank = std::clamp<std::size_t>(lo_rank, 1, xs_.size());
    hi_rank = std::clamp<std::size_t>(hi_rank, 1, xs_.size());
    return {quantile(alpha), xs_[lo_rank - 1], xs_[hi_rank - 1]};
  }

  /// Mean of the order statistics at and above the alpha quantile.
  [[nodiscard]] double tail_mean(double alpha) const {
    const std::size_t k = rank(alpha) - 1;
    double s = 0.0;
    for (std::size_t i = k; i < xs_.size(); ++i) {
      s += xs_[i];
    }
    return s / static_cast<double>(xs_.size() - k);
  }

  /// sum_i x_(i) w(i/T) / T, where w is a spectrum on (0,1].
  template <class Phi>
  [[nodiscard]] double spectral(Phi&& phi) const {
    const auto n = static_cast<double>(xs_.size());
    double s = 0.0;
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      s += xs_[i] * phi(static_cast<double>(i + 1) / n);
    }
    return s / n;
  }

 private:
  static void check_level(double p, const char* name) {
    if (!(p > 0.0 && p < 1.0)) {
      throw DomainError(std::string("empirical quantile: ") + name + " must lie in (0,1)");
    }
  }

  [[nodiscard]] std::size_t rank(double alpha) const {
    const auto n = static_cast<double>(xs_.size());
    auto k = static_cast<std::size_t>(std::ceil(alpha * n - 1e-9 * alpha * n));
    return std::clamp<std::size_t>(k, 1, xs_.size());
  }

  std::vector<double> xs_;
};

inline QuantileEstimate empirical_quantile_ci(const SampleBatch& batch, double alpha, double level) {
  if (batch.values.empty()) {
    throw StateError("empirical_quantile_ci: batch is empty");
  }
  return SortedSample(batch.values).quantile_ci(alpha, level);
}

struct TailProbability {
  double estimate = 0.0;
  double variance = 0.0;
};

/// Fraction of draws strictly above `threshold` with variance p(1-p)/T.
inline TailProbability tail_probability_mc(const SampleBatch& batch, double threshold) {
  if (batch.values.empty()) {
    throw StateError("tail_probability_mc: batch is empty");
  }
  std::size_t hits = 0;
  for (double v : batch.values) {
    hits += v > threshold ? 1U : 0U;
  }
  const auto n = static_cast<double>(batch.values.size());
  const double p = static_cast<double>(hits) / n;
  return {p, p * (1.0 - p) / n};
}

/// One value per line after a "# model=<hash> seed=<seed> count=<T>" header.
inline void write_batch_csv(const SampleBatch& batch, const CompoundModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out << "# model=" << model.hash() << " seed=" << batch.seed << " count=" << batch.count() << "\n";
  char buf[32];
  for (double v : batch.values) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
  if (!out) {
    throw IoError("write failed for " + path);
  }
}

/// Reads a batch written by write_batch_csv; returns the model hash found in
/// the header alongside the batch.
inline std::pair<SampleBatch, std::string> read_batch_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  std::string header;
  std::getline(in, header);
  SampleBatch batch;
  std::string hash;
  std::istringstream hs(header);
  std::string tok;
  while (hs >> tok) {
    if (tok.rfind("model=", 0) == 0) {
      hash = tok.substr(6);
    } else if (tok.rfind("seed=", 0) == 0) {
      batch.seed = std::stoull(tok.substr(5));
    }
  }
  if (hash.empty()) {
    throw IoError(path + ": missing batch header");
  }
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      batch.values.push_back(std::stod(line));
    }
  }
  return {std::move(batch), hash};
}

}  // namespace lda
