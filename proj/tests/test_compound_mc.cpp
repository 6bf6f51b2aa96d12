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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "lda/compound_mc.hpp"
#include "oracles.hpp"

namespace {

using lda::CompoundModel;
using lda::Degenerate;
using lda::FrequencyModel;
using lda::LogNormal;
using lda::Poisson;
using lda::RandomStream;
using lda::SampleBatch;

CompoundModel ln_model(double sigma) {
  return {FrequencyModel{Poisson{2.0}}, lda::SeverityModel{LogNormal{2.0, sigma}}};
}

// Reference values from an independent lattice recursion (rounding, step
// 0.01 and 0.005 agree to 8 digits) for Poisson(2)-LogNormal(2, 0.5).
constexpr double kTail57 = 0.0102288955;
constexpr double kCdf20 = 0.6545489016;
constexpr double kQ99 = 57.2;

TEST(SimulateCompound, ZeroRateGivesZeroLosses) {
  const CompoundModel m{FrequencyModel{Poisson{0.0}}, lda::SeverityModel{LogNormal{2.0, 0.5}}};
  RandomStream rng(1);
  const auto b = lda::simulate_compound(m, 1000, rng);
  ASSERT_EQ(b.count(), 1000U);
  for (double v : b.values) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(SimulateCompound, UnitAtomReducesToCount) {
  const CompoundModel m{FrequencyModel{Poisson{3.0}}, lda::SeverityModel{Degenerate{1.0}}};
  RandomStream rng(2);
  const auto b = lda::simulate_compound(m, 200000, rng);
  for (double v : b.values) {
    EXPECT_EQ(v, std::round(v));
  }
  const double se = std::sqrt(oracle::variance(b.values) / 200000.0);
  EXPECT_NEAR(oracle::mean(b.values), 3.0, 3.0 * se);
}

TEST(SimulateCompound, MeanMatchesWaldIdentity) {
  const auto m = ln_model(0.5);
  const auto b = lda::simulate_compound(m, 1000000, 3);
  const double target = 2.0 * std::exp(2.125);
  EXPECT_NEAR(target, 16.7458, 1e-3);
  const double se = std::sqrt(oracle::variance(b.values) / 1e6);
  EXPECT_NEAR(oracle::mean(b.values), target, 3.0 * se);
  for (double v : b.values) {
    ASSERT_GE(v, 0.0);
  }
}

TEST(SimulateCompound, RejectsEmptyRequest) {
  RandomStream rng(1);
  EXPECT_THROW((void)lda::simulate_compound(ln_model(0.5), 0, rng), lda::DomainError);
}

TEST(SimulateCompound, SingleStreamIsDeterministic) {
  RandomStream r1(99);
  RandomStream r2(99);
  const auto a = lda::simulate_compound(ln_model(1.0), 5000, r1);
  const auto b = lda::simulate_compound(ln_model(1.0), 5000, r2);
  EXPECT_EQ(a.values, b.values);
}

TEST(SimulateCompound, ChunkedBatchIgnoresThreadCount) {
  const auto m = ln_model(1.0);
  const std::size_t T = 3 * lda::kMcChunk + 17;
  const auto one = lda::simulate_compound(m, T, 5, {1, true});
  const auto four = lda::simulate_compound(m, T, 5, {4, true});
  EXPECT_EQ(one.values, four.values);
  EXPECT_EQ(one.seed, 5U);
}

TEST(EmpiricalQuantile, GeneralizedInverseOnIntegerGrid) {
  SampleBatch b;
  for (int i = 100; i >= 1; --i) {
    b.values.push_back(i);
  }
  const auto q = lda::empirical_quantile_ci(b, 0.5, 0.95);
  EXPECT_EQ(q.point, 50.0);
  EXPECT_LE(q.lower, q.point);
  EXPECT_GE(q.upper, q.point);
  lda::SortedSample s(b.values);
  EXPECT_EQ(s.quantile(0.01), 1.0);
  EXPECT_EQ(s.quantile(0.011), 2.0);
  EXPECT_EQ(s.quantile(0.999), 100.0);
}

TEST(EmpiricalQuantile, OrderStatisticBoundsAreBinomialRanks) {
  SampleBatch b;
  for (int i = 1; i <= 1000; ++i) {
    b.values.push_back(i);
  }
  const auto q = lda::empirical_quantile_ci(b, 0.5, 0.95);
  // Normal approximation to the binomial ranks: 500 -/+ 1.96 sqrt(250).
  EXPECT_NEAR(q.lower, 469.0, 1.0);
  EXPECT_NEAR(q.upper, 532.0, 1.0);
}

TEST(EmpiricalQuantile, EmptyBatchIsStateError) {
  EXPECT_THROW((void)lda::empirical_quantile_ci(SampleBatch{}, 0.5, 0.95), lda::StateError);
}

TEST(EmpiricalQuantile, RejectsBadLevels) {
  SampleBatch b{{1.0, 2.0}, 0};
  EXPECT_THROW((void)lda::empirical_quantile_ci(b, 1.0, 0.95), lda::DomainError);
  EXPECT_THROW((void)lda::empirical_quantile_ci(b, 0.5, 0.0), lda::DomainError);
}

TEST(EmpiricalQuantile, IntervalCoversReferenceQuantile) {
  const auto b = lda::simulate_compound(ln_model(0.5), 1000000, 11);
  const auto q = lda::empirical_quantile_ci(b, 0.99, 0.95);
  EXPECT_LE(q.lower, kQ99);
  EXPECT_GE(q.upper, kQ99);
  EXPECT_NEAR(q.point, kQ99, 1.5);
}

TEST(TailProbability, CertainEvent) {
  SampleBatch b{{3.0, 4.0, 5.0}, 0};
  const auto t = lda::tail_probability_mc(b, 1.0);
  EXPECT_EQ(t.estimate, 1.0);
  EXPECT_EQ(t.variance, 0.0);
}

TEST(TailProbability, BernoulliVariance) {
  SampleBatch b{{0, 0, 0, 0, 0, 0, 0, 1, 1, 1}, 0};
  const auto t = lda::tail_probability_mc(b, 0.5);
  EXPECT_DOUBLE_EQ(t.estimate, 0.3);
  EXPECT_NEAR(t.variance, 0.021, 1e-15);
}

TEST(TailProbability, StrictExceedance) {
  SampleBatch b{{1.0, 2.0, 2.0, 3.0}, 0};
  EXPECT_DOUBLE_EQ(lda::tail_probability_mc(b, 2.0).estimate, 0.25);
}

TEST(TailProbability, MatchesReferenceTail) {
  const auto b = lda::simulate_compound(ln_model(0.5), 1000000, 12);
  const auto t = lda::tail_probability_mc(b, 57.0);
  EXPECT_NEAR(t.estimate, kTail57, 3.0 * std::sqrt(t.variance));
  const auto body = lda::tail_probability_mc(b, 20.0);
  EXPECT_NEAR(1.0 - body.estimate, kCdf20, 3.0 * std::sqrt(body.variance));
}

TEST(TailProbability, ReplicatesAreUnbiased) {
  const auto m = ln_model(0.5);
  std::vector<double> est;
  for (std::uint64_t r = 0; r < 100; ++r) {
    est.push_back(lda::tail_probability_mc(lda::simulate_compound(m, 10000, 1000 + r), 40.0).estimate);
  }
  const auto ref = lda::tail_probability_mc(lda::simulate_compound(m, 2000000, 77), 40.0);
  const double se = std::sqrt(oracle::variance(est) / 100.0 + ref.variance);
  EXPECT_NEAR(oracle::mean(est), ref.estimate, 4.0 * se);
}

TEST(TailProbability, VarianceScalesInverselyWithT) {
  const auto m = ln_model(0.5);
  std::vector<double> lx;
  std::vector<double> ly;
  std::uint64_t seed = 5000;
  for (std::size_t T : {100U, 1000U, 10000U, 100000U}) {
    std::vector<double> est;
    for (int r = 0; r < 60; ++r) {
      est.push_back(lda::tail_probability_mc(lda::simulate_compound(m, T, seed++), 30.0).estimate);
    }
    lx.push_back(std::log(static_cast<double>(T)));
    ly.push_back(std::log(oracle::variance(est)));
  }
  EXPECT_NEAR(oracle::slope(lx, ly), -1.0, 0.15);
}

TEST(SortedSample, TailMeanAndStepSpectrum) {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) {
    v.push_back(i);
  }
  lda::SortedSample s(v);
  // Order statistics 90..100: the 0.9 quantile is 90 and is included.
  EXPECT_DOUBLE_EQ(s.tail_mean(0.9), 95.0);
  // Step spectrum 10 on (0.9, 1]: the ES-type weighting.
  const double srm = s.spectral([](double u) { return u > 0.9 + 1e-12 ? 10.0 : 0.0; });
  EXPECT_NEAR(srm, 95.5, 1e-12);
  EXPECT_NEAR(s.spectral([](double) { return 1.0; }), 50.5, 1e-12);
}

TEST(BatchCsv, RoundTripsValuesAndHeader) {
  const auto m = ln_model(0.5);
  RandomStream rng(4);
  auto b = lda::simulate_compound(m, 257, rng);
  b.seed = 4;
  const auto path = (std::filesystem::temp_directory_path() / "lda_batch_roundtrip.csv").string();
  lda::write_batch_csv(b, m, path);
  const auto [back, hash] = lda::read_batch_csv(path);
  EXPECT_EQ(hash, m.hash());
  EXPECT_EQ(back.seed, 4U);
  EXPECT_EQ(back.values, b.values);
  std::remove(path.c_str());
}

TEST(BatchCsv, MissingFileIsIoError) {
  EXPECT_THROW((void)lda::read_batch_csv("/nonexistent/dir/batch.csv"), lda::IoError);
}

TEST(CompoundModel, HashIsStableAndDistinguishesModels) {
  EXPECT_EQ(ln_model(0.5).hash(), ln_model(0.5).hash());
  EXPECT_NE(ln_model(0.5).hash(), ln_model(1.0).hash());
  EXPECT_EQ(ln_model(0.5).hash().size(), 16U);
}

}  // namespace
