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
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lda/compound_mc.hpp"
#include "lda/errors.hpp"
#include "lda/parallel.hpp"
#include "lda/random.hpp"
#include "lda/special.hpp"

namespace lda {

// ---------------------------------------------------------------------------
// Finite-state tools

using Matrix = std::vector<std::vector<double>>;

/// M(x, .) = K(x, .) 1_A + (1 - K(x, A)) delta_x.
inline Matrix restricted_mh_matrix(const Matrix& K, const std::vector<bool>& in_a) {
  const std::size_t n = K.size();
  if (in_a.size() != n) {
    throw DomainError("restricted_mh_matrix: mask size does not match the kernel");
  }
  Matrix M(n, std::vector<double>(n, 0.0));
  for (std::size_t x = 0; x < n; ++x) {
    if (K[x].size() != n) {
      throw DomainError("restricted_mh_matrix: kernel must be square");
    }
    double stay = 1.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (in_a[y] && y != x) {
        M[x][y] = K[x][y];
        stay -= K[x][y];
      }
    }
    M[x][x] = stay;
  }
  return M;
}

inline Matrix matmul(const Matrix& A, const Matrix& B) {
  const std::size_t n = A.size();
  const std::size_t m = B.empty() ? 0 : B[0].size();
  Matrix C(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < B.size(); ++k) {
      if (A[i][k] == 0.0) {
        continue;
      }
      for (std::size_t j = 0; j < m; ++j) {
        C[i][j] += A[i][k] * B[k][j];
      }
    }
  }
  return C;
}

struct MixingDiagnostic {
  /// Largest epsilon with M(x, .) >= epsilon nu(.) for every x.
  double epsilon = 0.0;
  double stationarity_residual = 0.0;
  /// tv[m - 1][x] = ||M^m(x, .) - eta||_tv for m = 1..m_max.
  std::vector<std::vector<double>> tv;
  std::vector<double> bound;

  [[nodiscard]] double worst(std::size_t m) const {
    return *std::max_element(tv.at(m - 1).begin(), tv.at(m - 1).end());
  }
};

/// Exact total-variation distances of M^m(x, .) to eta against (1 - eps)^m.
inline MixingDiagnostic tv_convergence_check(const Matrix& M, const std::vector<double>& eta, int m_max) {
  const std::size_t n = M.size();
  if (eta.size() != n || m_max < 1) {
    throw DomainError("tv_convergence_check: need a target of matching size and m_max >= 1");
  }
  MixingDiagnostic d;
  for (std::size_t y = 0; y < n; ++y) {
    double etam = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      etam += eta[x] * M[x][y];
    }
    d.stationarity_residual = std::max(d.stationarity_residual, std::abs(etam - eta[y]));
  }
  if (d.stationarity_residual > 1e-12) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "tv_convergence_check: target is not invariant (residual %.3g)",
                  d.stationarity_residual);
    throw InvalidTargetError(buf);
  }
  for (std::size_t y = 0; y < n; ++y) {
    double lo = 1.0;
    for (std::size_t x = 0; x < n; ++x) {
      lo = std::min(lo, M[x][y]);
    }
    d.epsilon += lo;
  }
  // Rows of (I - 1 eta) M^m, propagated directly so that distances far below
  // the entries of M keep their relative accuracy.
  Matrix D(n, std::vector<double>(n));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      D[x][y] = (x == y ? 1.0 : 0.0) - eta[y];
    }
  }
  for (int m = 1; m <= m_max; ++m) {
    D = matmul(D, M);
    std::vector<double> row(n);
    for (std::size_t x = 0; x < n; ++x) {
      // Rows sum to zero; rounding in the row sums of M would otherwise leave
      // a residue along eta that never decays.
      double drift = 0.0;
      for (std::size_t y = 0; y < n; ++y) {
        drift += D[x][y];
      }
      for (std::size_t y = 0; y < n; ++y) {
        D[x][y] -= drift * eta[y];
      }
      double s = 0.0;
      for (std::size_t y = 0; y < n; ++y) {
        s += std::abs(D[x][y]);
      }
      row[x] = std::min(1.0, 0.5 * s);
    }
    d.tv.push_back(std::move(row));
    d.bound.push_back(std::pow(1.0 - d.epsilon, m));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Weighted measures and selection

template <class T>
struct DiscreteMeasure {
  std::vector<T> atoms;
  std::vector<double> weights;
};

/// Psi_G(mu): weights proportional to w_i G(x_i), renormalized.
template <class T, class G>
DiscreteMeasure<T> boltzmann_gibbs(const DiscreteMeasure<T>& mu, G&& potential) {
  DiscreteMeasure<T> out;
  out.atoms = mu.atoms;
  out.weights.resize(mu.weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    out.weights[i] = mu.weights[i] * potential(mu.atoms[i]);
    total += out.weights[i];
  }
  if (!(total > 0.0)) {
    throw ExtinctionError("boltzmann_gibbs: potential has zero mass under the measure", -1);
  }
  for (auto& w : out.weights) {
    w /= total;
  }
  return out;
}

enum class ResamplingScheme { Multinomial, Systematic };

struct SelectionOutcome {
  /// eta^N(G), the mean potential before selection.
  double mean_potential = 0.0;
  /// Fraction of particles kept in place.
  double acceptance = 0.0;
  std::size_t replaced = 0;
  double ess = 0.0;
};

namespace detail {

/// Index i with c[i-1] < u <= c[i] for the cumulative weights c.
inline std::size_t draw_index(const std::vector<double>& cum, double u) {
  const auto it = std::lower_bound(cum.begin(), cum.end(), u * cum.back());
  return std::min(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
}

}  // namespace detail

/// Multinomial: particle i is kept with probability G(xi_i) and otherwise
/// replaced by a draw from Psi_G(eta^N). Systematic: all N are redrawn from
/// Psi_G(eta^N) with one shared uniform. G must take values in [0, 1].
template <class T, class G, UniformSource Rng>
SelectionOutcome selection_transition(std::vector<T>& particles, G&& potential, Rng& rng,
                                      ResamplingScheme scheme = ResamplingScheme::Multinomial, int level = 0) {
  const std::size_t n = particles.size();
  if (n == 0) {
    throw DomainError("selection_transition: empty population");
  }
  std::vector<double> g(n);
  std::vector<double> cum(n);
  double s = 0.0;
  double s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = potential(particles[i]);
    if (!(g[i] >= 0.0 && g[i] <= 1.0)) {
      throw DomainError("selection_transition: potential must lie in [0,1]");
    }
    s += g[i];
    s2 += g[i] * g[i];
    cum[i] = s;
  }
  SelectionOutcome out;
  out.mean_potential = s / static_cast<double>(n);
  if (!(s > 0.0)) {
    throw ExtinctionError("selection_transition: no particle has positive potential at level " +
                              std::to_string(level),
                          level);
  }
  out.ess = s * s / s2;
  const std::vector<T> old = particles;
  if (scheme == ResamplingScheme::Systematic) {
    const double u = rng.uniform();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = detail::draw_index(cum, (static_cast<double>(i) + u) / static_cast<double>(n));
      particles[i] = old[j];
      if (j != i) {
        ++out.replaced;
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      bool keep = g[i] >= 1.0;
      if (!keep && g[i] > 0.0) {
        keep = rng.uniform() <= g[i];
      }
      if (!keep) {
        particles[i] = old[detail::draw_index(cum, rng.uniform())];
        ++out.replaced;
      }
    }
  }
  out.acceptance = 1.0 - static_cast<double>(out.replaced) / static_cast<double>(n);
  return out;
}

// ---------------------------------------------------------------------------
// Splitting models

/// A base law on State with a score whose upper level sets are the rare
/// events, and a proposal K that is reversible with respect to the base law.
template <class M>
concept SplittingModel = requires(const M& m, const typename M::State& s, RandomStream& rng) {
  { m.sample(rng) } -> std::convertible_to<typename M::State>;
  { m.score(s) } -> std::convertible_to<double>;
  { m.propose(s, rng) } -> std::convertible_to<typename M::State>;
};

/// Standard normal base with the autoregressive proposal
/// y = rho x + sqrt(1 - rho^2) W, which leaves N(0,1) invariant.
struct GaussianModel {
  using State = double;
  double rho = 0.9;

  template <UniformSource Rng>
  double sample(Rng& rng) const {
    return standard_normal(rng);
  }
  [[nodiscard]] double score(double x) const noexcept { return x; }
  template <UniformSource Rng>
  double propose(double x, Rng& rng) const {
    return rho * x + std::sqrt(1.0 - rho * rho) * standard_normal(rng);
  }
};

/// Annual loss driven by i.i.d. Gaussian latents (c, s_1, ..., s_L):
/// N = F_N^{-1}(Phi(c)), X_i = F_X^{-1}(Phi(s_i)). The same autoregressive
/// move on every coordinate leaves the latent law invariant.
class CompoundLatentModel {
 public:
  using State = std::vector<double>;

  explicit CompoundLatentModel(CompoundModel model, double rho = 0.8) : model_(std::move(model)), rho_(rho) {
    if (!(rho_ >= 0.0 && rho_ < 1.0)) {
      throw DomainError("compound latent model: rho must lie in [0,1)");
    }
    double c = 0.0;
    for (int n = 0; n < 100000; ++n) {
      c += model_.frequency.pmf(n);
      cum_.push_back(c);
      if (1.0 - c < 1e-14) {
        break;
      }
    }
    truncated_ = std::max(0.0, 1.0 - c);
  }

  [[nodiscard]] const CompoundModel& model() const noexcept { return model_; }
  [[nodiscard]] std::size_t max_count() const noexcept { return cum_.size() - 1; }
  /// Count mass beyond max_count(), folded onto max_count().
  [[nodiscard]] double truncated_mass() const noexcept { return truncated_; }

  template <UniformSource Rng>
  State sample(Rng& rng) const {
    State s(cum_.size());
    for (auto& v : s) {
      v = standard_normal(rng);
    }
    return s;
  }

  [[nodiscard]] int count(const State& s) const {
    const double u = normal_cdf(s[0]);
    const auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cum_.begin(), static_cast<std::ptrdiff_t>(max_count())));
  }

  [[nodiscard]] double score(const State& s) const {
    const int n = count(s);
    double z = 0.0;
    for (int i = 1; i <= n; ++i) {
      z += severity_from_latent(s[static_cast<std::size_t>(i)]);
    }
    return z;
  }

  template <UniformSource Rng>
  State propose(const State& s, Rng& rng) const {
    const double c = std::sqrt(1.0 - rho_ * rho_);
    State y(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      y[i] = rho_ * s[i] + c * standard_normal(rng);
    }
    return y;
  }

 private:
  [[nodiscard]] double severity_from_latent(double v) const {
    if (const auto* ln = std::get_if<LogNormal>(&model_.severity.kind())) {
      return std::exp(ln->mu + ln->sigma * v);
    }
    const double u = std::clamp(normal_cdf(v), 1e-300, 1.0 - 1e-16);
    return model_.severity.quantile(u);
  }

  CompoundModel model_;
  double rho_;
  std::vector<double> cum_;
  double truncated_ = 0.0;
};

// ---------------------------------------------------------------------------
// Splitting engine

struct SmcConfig {
  /// Strictly increasing thresholds z_1 < ... < z_n; the target is z_n.
  std::vector<double> levels;
  std::size_t particles = 1000;
  int mh_steps = 5;
  ResamplingScheme resampling = ResamplingScheme::Multinomial;
  /// Place levels at the rho-quantile of the current population; only the
  /// last entry of `levels` is used as the target.
  bool adaptive = false;
  double adaptive_quantile = 0.5;
  int max_levels = 200;
  /// Consecutive rejections after which a particle counts as stuck.
  int stuck_patience = 20;
};

struct LevelTrace {
  int level = 0;
  double threshold = 0.0;
  double success_fraction = 0.0;
  double ess = 0.0;
  /// Restricted-MH acceptance in the mutation after this selection; NaN on
  /// the last level, which is not mutated.
  double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
  std::size_t stuck = 0;
};

struct SmcEstimate {
  double probability = 0.0;
  std::vector<double> fractions;
  std::vector<LevelTrace> trace;
  /// Level (1-based) at which no particle survived.
  std::optional<int> extinct_level;
  bool adaptive = false;
};

/// Product of stored fractions, in level order.
inline double fraction_product(const std::vector<double>& fractions) {
  double p = 1.0;
  for (double f : fractions) {
    p *= f;
  }
  return p;
}

inline constexpr std::size_t kSmcChunk = 256;

namespace detail {

inline double empirical_quantile(std::vector<double> v, double q) {
  const auto k = std::min(v.size() - 1, static_cast<std::size_t>(std::floor(q * static_cast<double>(v.size()))));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

}  // namespace detail

struct NoObserver {
  template <class... Args>
  void operator()(Args&&...) const noexcept {}
};

/// Multilevel splitting: select on {score > z_p}, then move every particle
/// with mh_steps restricted-MH steps targeting the base law given that set.
/// Returns prod_p eta_p^N(G_p) as the estimate of P(score > z_n).
/// observer(level, z, states, scores) sees the population after each mutation.
template <SplittingModel Model, class Observer = NoObserver>
SmcEstimate smc_rare_event(const Model& model, const SmcConfig& cfg, std::uint64_t seed,
                           const ExecutionPolicy& policy = {}, Observer&& observer = {}) {
  using State = typename Model::State;
  if (cfg.particles < 2) {
    throw DomainError("smc_rare_event: need at least 2 particles");
  }
  if (cfg.levels.empty()) {
    throw DomainError("smc_rare_event: need at least one level");
  }
  for (std::size_t i = 1; i < cfg.levels.size(); ++i) {
    if (!(cfg.levels[i] > cfg.levels[i - 1])) {
      throw DomainError("smc_rare_event: levels must be strictly increasing");
    }
  }
  if (cfg.mh_steps < 0) {
    throw DomainError("smc_rare_event: mh_steps must be non-negative");
  }
  if (cfg.adaptive && !(cfg.adaptive_quantile > 0.0 && cfg.adaptive_quantile < 1.0)) {
    throw DomainError("smc_rare_event: adaptive quantile must lie in (0,1)");
  }
  const std::size_t n = cfg.particles;
  const std::size_t chunks = (n + kSmcChunk - 1) / kSmcChunk;
  std::vector<State> xs(n);
  std::vector<double> scores(n);
  std::vector<int> rejections(n, 0);
  parallel_for(chunks, policy.threads, [&](std::size_t c) {
    auto rng = RandomStream::substream(seed, {0, c});
    for (std::size_t i = c * kSmcChunk; i < std::min(n, (c + 1) * kSmcChunk); ++i) {
      xs[i] = model.sample(rng);
      scores[i] = model.score(xs[i]);
    }
  });

  SmcEstimate est;
  est.adaptive = cfg.adaptive;
  const double target = cfg.levels.back();
  std::size_t fixed_next = 0;
  for (int level = 1;; ++level) {
    double z = 0.0;
    bool last = false;
    if (cfg.adaptive) {
      if (level > cfg.max_levels) {
        throw StateError("smc_rare_event: adaptive levels exceeded max_levels");
      }
      z = detail::empirical_quantile(scores, cfg.adaptive_quantile);
      if (!est.trace.empty() && !(z > est.trace.back().threshold)) {
        throw StateError("smc_rare_event: adaptive level did not increase; scores are tied");
      }
      if (z >= target) {
        z = target;
        last = true;
      }
    } else {
      z = cfg.levels[fixed_next++];
      last = fixed_next == cfg.levels.size();
    }

    // Selection on {score > z}, carrying scores and rejection counters along.
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) {
      idx[i] = i;
    }
    LevelTrace tr;
    tr.level = level;
    tr.threshold = z;
    auto srng = RandomStream::substream(seed, {static_cast<std::uint64_t>(level), 0xfeedULL});
    try {
      const auto sel = selection_transition(
          idx, [&](std::size_t i) { return scores[i] > z ? 1.0 : 0.0; }, srng, cfg.resampling, level);
      tr.success_fraction = sel.mean_potential;
      tr.ess = sel.ess;
    } catch (const ExtinctionError&) {
      tr.success_fraction = 0.0;
      tr.ess = 0.0;
      est.fractions.push_back(0.0);
      est.trace.push_back(tr);
      est.extinct_level = level;
      est.probability = 0.0;
      return est;
    }
    est.fractions.push_back(tr.success_fraction);
    {
      std::vector<State> nx(n);
      std::vector<double> ns(n);
      std::vector<int> nr(n);
      for (std::size_t i = 0; i < n; ++i) {
        nx[i] = xs[idx[i]];
        ns[i] = scores[idx[i]];
        nr[i] = idx[i] == i ? rejections[i] : 0;
      }
      xs = std::move(nx);
      scores = std::move(ns);
      rejections = std::move(nr);
    }
    if (last) {
      est.trace.push_back(tr);
      break;
    }

    // Mutation: restricted MH targeting the base law on {score > z}.
    std::vector<std::size_t> accepted(chunks, 0);
    parallel_for(chunks, policy.threads, [&](std::size_t c) {
      auto rng = RandomStream::substream(seed, {static_cast<std::uint64_t>(level), 1, c});
      for (std::size_t i = c * kSmcChunk; i < std::min(n, (c + 1) * kSmcChunk); ++i) {
        for (int s = 0; s < cfg.mh_steps; ++s) {
          State y = model.propose(xs[i], rng);
          const double sy = model.score(y);
          if (sy > z) {
            xs[i] = std::move(y);
            scores[i] = sy;
            rejections[i] = 0;
            ++accepted[c];
          } else {
            ++rejections[i];
          }
        }
      }
    });
    std::size_t acc = 0;
    for (auto a : accepted) {
      acc += a;
    }
    const double moves = static_cast<double>(n) * cfg.mh_steps;
    tr.acceptance_rate = moves > 0.0 ? static_cast<double>(acc) / moves : std::numeric_limits<double>::quiet_NaN();
    tr.stuck = static_cast<std::size_t>(
        std::count_if(rejections.begin(), rejections.end(), [&](int r) { return r >= cfg.stuck_patience; }));
    est.trace.push_back(tr);
    observer(level, z, std::as_const(xs), std::as_const(scores));
  }
  est.probability = fraction_product(est.fractions);
  return est;
}

struct ReplicateSummary {
  std::vector<double> values;
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  double relative_std_error = 0.0;
};

inline ReplicateSummary summarize_replicates(std::vector<double> values) {
  ReplicateSummary s;
  const auto r = static_cast<double>(values.size());
  if (values.size() < 2) {
    throw DomainError("summarize_replicates: need at least 2 replicates");
  }
  s.mean = pairwise_sum(values) / r;
  double ss = 0.0;
  for (double v : values) {
    ss += (v - s.mean) * (v - s.mean);
  }
  s.variance = ss / (r - 1.0);
  s.std_error = std::sqrt(s.variance / r);
  s.relative_std_error = s.mean != 0.0 ? std::sqrt(s.variance) / std::abs(s.mean) : std::numeric_limits<double>::infinity();
  s.values = std::move(values);
  return s;
}

/// Independent runs under substreams (seed, r). relative_std_error is the
/// relative SE of a single run.
template <SplittingModel Model>
ReplicateSummary smc_replicates(const Model& model, const SmcConfig& cfg, std::size_t replicates, std::uint64_t seed,
                                const ExecutionPolicy& policy = {}) {
  std::vector<double> v(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    v[r] = smc_rare_event(model, cfg, derive_seed(seed, {r}), policy).probability;
  }
  return summarize_replicates(std::move(v));
}

/// CSV with columns level, threshold, success_fraction, ess, acceptance_rate.
inline void write_trace_csv(const SmcEstimate& est, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out << "level,threshold,success_fraction,ess,acceptance_rate\n";
  char buf[160];
  for (const auto& t : est.trace) {
    if (std::isnan(t.acceptance_rate)) {
      std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g,n/a\n", t.level, t.threshold, t.success_fraction, t.ess);
    } else {
      std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g,%.10g\n", t.level, t.threshold, t.success_fraction, t.ess,
                    t.acceptance_rate);
    }
    out << buf;
  }
}

// ---------------------------------------------------------------------------
// Importance sampling

struct IsEstimate {
  double estimate = 0.0;
  /// Sample variance of the terms 1_A(Y) dP_X/dP_Y(Y).
  double term_variance = 0.0;
  /// term_variance / N.
  double variance = 0.0;
  std::vector<double> terms;
};

/// (1/N) sum 1_A(Y_i) r(Y_i) with Y_i from the twist and r = dP_X/dP_Y.
/// Twist must provide sample(rng) and ratio(y).
template <class Twist, class Pred, UniformSource Rng>
IsEstimate is_tail_estimator(const Twist& twist, Pred&& in_a, std::size_t n, Rng& rng) {
  if (n < 2) {
    throw DomainError("is_tail_estimator: need at least 2 draws");
  }
  IsEstimate out;
  out.terms.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto y = twist.sample(rng);
    if (!in_a(y)) {
      out.terms[i] = 0.0;
      continue;
    }
    const double r = twist.ratio(y);
    if (!std::isfinite(r) || r < 0.0) {
      throw SupportViolationError("is_tail_estimator: density ratio is not finite on the event");
    }
    out.terms[i] = r;
  }
  // Moments about the first term, so identical terms give exactly zero.
  const double ref = out.terms[0];
  double s1 = 0.0;
  double s2 = 0.0;
  for (double t : out.terms) {
    s1 += t - ref;
    s2 += (t - ref) * (t - ref);
  }
  const auto dn = static_cast<double>(n);
  out.estimate = ref + s1 / dn;
  out.term_variance = std::max(0.0, (s2 - s1 * s1 / dn) / (dn - 1.0));
  out.variance = out.term_variance / dn;
  return out;
}

/// N(theta, 1) proposal for a standard normal base; ratio exp(theta^2/2 - theta y).
struct GaussianTilt {
  double theta = 0.0;

  template <UniformSource Rng>
  double sample(Rng& rng) const {
    return theta + standard_normal(rng);
  }
  [[nodiscard]] double ratio(double y) const { return std::exp(0.5 * theta * theta - theta * y); }
};

/// Finite law on {0, ..., K-1}.
class DiscreteLaw {
 public:
  explicit DiscreteLaw(std::vector<double> pmf) : pmf_(std::move(pmf)) {
    double c = 0.0;
    for (double p : pmf_) {
      if (!(p >= 0.0)) {
        throw DomainError("discrete law: probabilities must be non-negative");
      }
      c += p;
      cum_.push_back(c);
    }
    if (!(c > 0.0)) {
      throw DomainError("discrete law: empty support");
    }
  }

  [[nodiscard]] double pmf(std::size_t k) const { return k < pmf_.size() ? pmf_[k] : 0.0; }
  [[nodiscard]] std::size_t size() const noexcept { return pmf_.size(); }

  template <UniformSource Rng>
  std::size_t sample(Rng& rng) const {
    return detail::draw_index(cum_, rng.uniform());
  }

  /// The law conditioned on the mask.
  [[nodiscard]] DiscreteLaw conditional(const std::vector<bool>& in_a) const {
    std::vector<double> q(pmf_.size(), 0.0);
    double mass = 0.0;
    for (std::size_t k = 0; k < pmf_.size(); ++k) {
      if (in_a.at(k)) {
        mass += pmf_[k];
      }
    }
    if (!(mass > 0.0)) {
      throw DomainError("discrete law: conditioning event has zero mass");
    }
    for (std::size_t k = 0; k < pmf_.size(); ++k) {
      q[k] = in_a.at(k) ? pmf_[k] / mass : 0.0;
    }
    return DiscreteLaw(std::move(q));
  }

 private:
  std::vector<double> pmf_;
  std::vector<double> cum_;
};

/// Twist by another finite law; ratio p(y)/q(y).
struct DiscreteTwist {
  DiscreteLaw base;
  DiscreteLaw proposal;

  template <UniformSource Rng>
  std::size_t sample(Rng& rng) const {
    return proposal.sample(rng);
  }
  [[nodiscard]] double ratio(std::size_t y) const {
    const double q = proposal.pmf(y);
    return q > 0.0 ? base.pmf(y) / q : std::numeric_limits<double>::infinity();
  }
};

}  // namespace lda
