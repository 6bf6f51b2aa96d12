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
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "lda/asymptotics.hpp"
#include "lda/compound_mc.hpp"
#include "lda/errors.hpp"
#include "lda/frequency.hpp"
#include "lda/parallel.hpp"
#include "lda/random.hpp"
#include "lda/severity.hpp"

namespace lda {

/// Second-kind Volterra form of the compound density
///   f(x) = g(x) + int_0^x k(x, x1) f(x1) dx1,
/// g(x) = p1 f_X(x), k(x, x1) = (a + b (x - x1)/x) f_X(x - x1).
///
/// In GPD mode the kernel changes with the path depth j: with
/// l_j = lambda + j theta, step j uses
///   k_j(x, x1) = c_j (theta + l_j y/x) f_X(y),  y = x - x1,
///   c_j = l_j/(l_j + theta) C(l_j + theta)/C(l_j),
/// and a path stopping at depth n collects g_n(x) = p1(l_n) f_X(x).
/// At j = 0 this is the (theta + lambda y/x) lambda/(lambda + theta) kernel.
class VolterraKernel {
 public:
  struct Coefficients {
    double a = 0.0;
    double b = 0.0;
    double p1 = 0.0;
  };

  VolterraKernel(const SeverityModel& severity, const PanjerParams& params, double p0)
      : severity_(severity), gpd_mode_(false), base_{params.a, params.b, params.first_mass()}, p0_(p0) {
    require_density();
  }

  VolterraKernel(const SeverityModel& severity, double lambda, double theta)
      : severity_(severity), gpd_mode_(true), lambda_(lambda), theta_(theta), p0_(gpd_pmf(lambda, theta, 0)) {
    require_density();
  }

  [[nodiscard]] bool gpd_mode() const noexcept { return gpd_mode_; }
  [[nodiscard]] const SeverityModel& severity() const noexcept { return severity_; }

  /// P(N = 0): the atom of the compound law at zero.
  [[nodiscard]] double p0() const noexcept { return p0_; }

  [[nodiscard]] Coefficients at(int depth) const {
    if (!gpd_mode_) {
      return base_;
    }
    const double l = lambda_ + depth * theta_;
    const double ln = l + theta_;
    Coefficients c;
    if (!(l > 0.0)) {
      return c;
    }
    c.p1 = gpd_pmf(l, theta_, 1);
    if (!(ln > 0.0)) {
      return c;
    }
    const double scale = l / ln * detail::gpd_normalizer(ln, theta_) / detail::gpd_normalizer(l, theta_);
    c.a = scale * theta_;
    c.b = scale * l;
    return c;
  }

  [[nodiscard]] double g(double x, int depth = 0) const {
    if (!(x > 0.0)) {
      return 0.0;
    }
    return at(depth).p1 * severity_.density(x);
  }

  /// Zero for x1 >= x or x1 <= 0.
  [[nodiscard]] double k(double x, double x1, int depth = 0) const {
    if (!(x1 > 0.0) || !(x1 < x)) {
      return 0.0;
    }
    const auto c = at(depth);
    const double y = x - x1;
    return (c.a + c.b * y / x) * severity_.density(y);
  }

 private:
  void require_density() const {
    if (!severity_.has_density()) {
      throw UnsupportedError("volterra kernel: severity needs a density");
    }
  }

  SeverityModel severity_;
  bool gpd_mode_;
  Coefficients base_;
  double lambda_ = 0.0;
  double theta_ = 0.0;
  double p0_ = 1.0;
};

inline VolterraKernel build_volterra_kernel(const CompoundModel& model) {
  if (const auto* g = std::get_if<GeneralizedPoisson>(&model.frequency.kind())) {
    return {model.severity, g->lambda, g->theta};
  }
  const auto params = model.frequency.panjer_params();
  return {model.severity, params, params.p0};
}

enum class ProposalKind {
  /// Mixture: with probability 1 - jump_weight, y = x - x1 is drawn from
  /// (|a| + |b| y/x) f_X(y) truncated to (0, x); otherwise x1 itself is drawn
  /// from f_X truncated to (0, x), which reaches the small remainders that
  /// dominate the density far in the tail.
  SizeBiased,
  /// x1 = x B with B ~ Beta(shape_a, shape_b); Beta(1,1) is uniform on (0, x).
  BetaDecrement,
};

enum class InitialLaw { Point, Interval };

struct PathSamplerConfig {
  ProposalKind proposal = ProposalKind::SizeBiased;
  double beta_a = 1.0;
  double beta_b = 1.0;
  /// Weight of the truncated-severity component of the SizeBiased mixture.
  double jump_weight = 0.1;
  /// Absorption probability; unset means 1/(1 + E[N]).
  std::optional<double> absorption;
  InitialLaw initial = InitialLaw::Point;
  double x0 = 1.0;
  double xa = 0.0;
  double xb = 1.0;
  std::size_t particles = 1000;
  /// Add g(x0) exactly and force the first move; unset means on for point
  /// starts and off for interval starts.
  std::optional<bool> variance_reduction;
};

struct PathSample {
  std::vector<double> states;
  double weight = 0.0;

  [[nodiscard]] int length() const noexcept { return static_cast<int>(states.size()) - 1; }
};

/// Draws absorbed paths for one kernel and evaluates their weights.
class PathSampler {
 public:
  PathSampler(VolterraKernel kernel, PathSamplerConfig cfg, double mean_count)
      : kernel_(std::move(kernel)), cfg_(cfg) {
    pd_ = cfg_.absorption ? *cfg_.absorption : 1.0 / (1.0 + mean_count);
    if (!(pd_ > 0.0 && pd_ <= 1.0)) {
      throw DomainError("path sampler: absorption probability must lie in (0,1]");
    }
    if (!(cfg_.jump_weight >= 0.0 && cfg_.jump_weight < 1.0)) {
      throw DomainError("path sampler: jump weight must lie in [0,1)");
    }
    if (cfg_.proposal == ProposalKind::BetaDecrement && !(cfg_.beta_a > 0.0 && cfg_.beta_b > 0.0)) {
      throw DomainError("path sampler: beta shapes must be positive");
    }
    if (cfg_.initial == InitialLaw::Interval && !(cfg_.xb > cfg_.xa && cfg_.xa >= 0.0)) {
      throw DomainError("path sampler: interval needs 0 <= xa < xb");
    }
    if (cfg_.initial == InitialLaw::Point && !(cfg_.x0 > 0.0)) {
      throw DomainError("path sampler: x0 must be positive");
    }
    log_beta_norm_ = std::lgamma(cfg_.beta_a + cfg_.beta_b) - std::lgamma(cfg_.beta_a) - std::lgamma(cfg_.beta_b);
  }

  PathSampler(const CompoundModel& model, PathSamplerConfig cfg)
      : PathSampler(build_volterra_kernel(model), cfg, model.frequency.mean()) {}

  [[nodiscard]] const VolterraKernel& kernel() const noexcept { return kernel_; }
  [[nodiscard]] const PathSamplerConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] double absorption() const noexcept { return pd_; }

  [[nodiscard]] bool variance_reduction() const noexcept {
    return cfg_.variance_reduction.value_or(cfg_.initial == InitialLaw::Point);
  }

  /// 1/mu(x0): 1 for a point start, (xb - xa) for a uniform interval start.
  [[nodiscard]] double inverse_initial_density() const noexcept {
    return cfg_.initial == InitialLaw::Point ? 1.0 : cfg_.xb - cfg_.xa;
  }

  template <UniformSource Rng>
  double draw_start(Rng& rng) const {
    if (cfg_.initial == InitialLaw::Point) {
      return cfg_.x0;
    }
    double x = cfg_.xa + (cfg_.xb - cfg_.xa) * rng.uniform();
    if (!(x > 0.0)) {
      x = std::nextafter(0.0, 1.0);
    }
    return x;
  }

  /// Normalized proposal density of x1 given x, before the (1 - P_d) factor.
  [[nodiscard]] double proposal_density(double x, double x1, int depth) const {
    if (!(x1 > 0.0) || !(x1 < x)) {
      return 0.0;
    }
    if (cfg_.proposal == ProposalKind::BetaDecrement) {
      const double t = x1 / x;
      return std::exp(log_beta_norm_ + (cfg_.beta_a - 1.0) * std::log(t) + (cfg_.beta_b - 1.0) * std::log1p(-t)) / x;
    }
    const auto c = kernel_.at(depth);
    const auto& sev = kernel_.severity();
    const double norm = size_biased_mass(x, c);
    const double fx = sev.cdf(x);
    const double y = x - x1;
    const double sb = norm > 0.0 ? (std::abs(c.a) + std::abs(c.b) * y / x) * sev.density(y) / norm : 0.0;
    const double jump = fx > 0.0 ? sev.density(x1) / fx : 0.0;
    return (1.0 - cfg_.jump_weight) * sb + cfg_.jump_weight * jump;
  }

  /// k(x, x1)/q(x, x1) for the normalized proposal q.
  [[nodiscard]] double step_ratio(double x, double x1, int depth) const {
    if (cfg_.proposal == ProposalKind::SizeBiased && cfg_.jump_weight == 0.0) {
      // q is proportional to |k|, so k/q is a sign times the normalizer.
      const auto c = kernel_.at(depth);
      const double y = x - x1;
      const double num = c.a + c.b * y / x;
      const double den = std::abs(c.a) + std::abs(c.b) * y / x;
      if (!(den > 0.0)) {
        return 0.0;
      }
      return num / den * size_biased_mass(x, c);
    }
    const double kk = kernel_.k(x, x1, depth);
    const double q = proposal_density(x, x1, depth);
    if (!(q > 0.0)) {
      if (kk != 0.0) {
        throw SupportViolationError("path weight: proposal density is zero where the kernel is not");
      }
      return 0.0;
    }
    return kk / q;
  }

  /// Draws x1 in (0, x). Returns nullopt when the kernel has no mass on
  /// (0, x) or the draw rounds onto an endpoint.
  template <UniformSource Rng>
  std::optional<double> propose(double x, int depth, Rng& rng) const {
    double x1 = 0.0;
    if (cfg_.proposal == ProposalKind::BetaDecrement) {
      x1 = x * beta_variate(cfg_.beta_a, cfg_.beta_b, rng);
    } else {
      const auto c = kernel_.at(depth);
      const auto& sev = kernel_.severity();
      const double wa = std::abs(c.a) * sev.cdf(x);
      const double wb = size_biased_mass(x, c) - wa;
      if (!(wa + wb > 0.0)) {
        return std::nullopt;
      }
      const double pick = rng.uniform();
      const double u = rng.uniform();
      if (pick <= cfg_.jump_weight) {
        x1 = sev.truncated_quantile(u, x);
      } else {
        const double v = (pick - cfg_.jump_weight) / (1.0 - cfg_.jump_weight) * (wa + wb);
        const double y = v <= wa ? sev.truncated_quantile(u, x) : sev.size_biased_quantile(u, x);
        x1 = x - y;
      }
    }
    if (!(x1 >= 0.0 && x1 <= x)) {
      throw SupportViolationError("path sampler: proposal left (0, x)");
    }
    if (x1 == 0.0 || x1 == x) {
      // Rounded onto the boundary, where the kernel carries no mass.
      return std::nullopt;
    }
    return x1;
  }

  /// One absorbed chain x0 > x1 > ... > xn and its weight.
  template <UniformSource Rng>
  PathSample simulate(Rng& rng) const {
    PathSample p;
    p.states.push_back(draw_start(rng));
    p.weight = run(p.states.front(), rng, &p.states);
    return p;
  }

  /// Weight of one fresh path started at x0 (or from mu when x0 is unset),
  /// without storing states.
  template <UniformSource Rng>
  double sample_weight(Rng& rng) const {
    return run(draw_start(rng), rng, nullptr);
  }

  /// Recomputes the weight of a stored path drawn without variance
  /// reduction, from absorption-scaled proposal densities.
  [[nodiscard]] double path_weight(const PathSample& path) const {
    const auto& s = path.states;
    if (s.empty()) {
      throw StateError("path_weight: empty path");
    }
    double w = inverse_initial_density();
    const int n = path.length();
    for (int j = 1; j <= n; ++j) {
      if (!(s[j] < s[j - 1]) || !(s[j] > 0.0)) {
        throw SupportViolationError("path_weight: states must be strictly decreasing positives");
      }
      w *= step_ratio(s[j - 1], s[j], j - 1) / (1.0 - pd_);
    }
    return w * kernel_.g(s[n], n) / pd_;
  }

 private:
  /// |a| F(x) + |b| PM(x)/x: the mass of |k(x, .)| on (0, x).
  [[nodiscard]] double size_biased_mass(double x, const VolterraKernel::Coefficients& c) const {
    const auto& sev = kernel_.severity();
    return std::abs(c.a) * sev.cdf(x) + std::abs(c.b) * sev.partial_moment(x) / x;
  }

  template <UniformSource Rng>
  double run(double x0, Rng& rng, std::vector<double>* states) const {
    const double inv_mu = inverse_initial_density();
    if (variance_reduction()) {
      // f(x0) = g(x0) + E_q[k/q f(x1)] with the first move forced.
      const double head = kernel_.g(x0, 0);
      if (pd_ == 1.0) {
        // No path survives a step: only the first Neumann term remains.
        return inv_mu * head;
      }
      const auto x1 = propose(x0, 0, rng);
      if (!x1) {
        return inv_mu * head;
      }
      const double r = step_ratio(x0, *x1, 0);
      if (r == 0.0) {
        return inv_mu * head;
      }
      if (states != nullptr) {
        states->push_back(*x1);
      }
      return inv_mu * (head + r * continue_path(*x1, 1, rng, states));
    }
    return inv_mu * continue_path(x0, 0, rng, states);
  }

  /// Unbiased estimate of the depth-`depth` density at x under absorption.
  template <UniformSource Rng>
  double continue_path(double x, int depth, Rng& rng, std::vector<double>* states) const {
    double w = 1.0;
    const double keep = 1.0 - pd_;
    for (;;) {
      if (rng.uniform() <= pd_) {
        return w * kernel_.g(x, depth) / pd_;
      }
      const auto x1 = propose(x, depth, rng);
      if (!x1) {
        return 0.0;
      }
      const double r = step_ratio(x, *x1, depth);
      if (r == 0.0) {
        return 0.0;
      }
      w *= r / keep;
      x = *x1;
      ++depth;
      if (states != nullptr) {
        states->push_back(x);
      }
    }
  }

  VolterraKernel kernel_;
  PathSamplerConfig cfg_;
  double pd_ = 0.5;
  double log_beta_norm_ = 0.0;
};

template <UniformSource Rng>
PathSample simulate_absorbed_path(const PathSampler& sampler, Rng& rng) {
  return sampler.simulate(rng);
}

inline double path_weight(const PathSample& path, const PathSampler& sampler) { return sampler.path_weight(path); }

enum class MeasureMode { PointwiseGrid, Interval };

/// Weighted atoms. Raw weights target a density; `scale` turns a weight into
/// probability mass (the grid cell width, or 1/N for interval atoms).
struct WeightedParticleMeasure {
  struct Atom {
    double x = 0.0;
    double weight = 0.0;
    double scale = 1.0;
    /// Variance of weight * scale, used for interval bounds.
    double mass_var = 0.0;

    [[nodiscard]] double mass() const noexcept { return weight * scale; }
  };

  MeasureMode mode = MeasureMode::PointwiseGrid;
  std::vector<Atom> atoms;
  /// Interval mode only: number of paths behind the atoms.
  std::size_t paths = 0;

  [[nodiscard]] double total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) {
      s += a.mass();
    }
    return s;
  }

  /// Atoms sorted by location.
  [[nodiscard]] std::vector<Atom> sorted() const {
    auto out = atoms;
    std::stable_sort(out.begin(), out.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
    return out;
  }

  /// Estimate of P(Z <= z).
  [[nodiscard]] double cdf(double z) const {
    double s = 0.0;
    for (const auto& a : atoms) {
      if (a.x <= z) {
        s += a.mass();
      }
    }
    return s;
  }

  /// Standard error of cdf(z).
  [[nodiscard]] double cdf_stderr(double z) const {
    if (mode == MeasureMode::PointwiseGrid) {
      double v = 0.0;
      for (const auto& a : atoms) {
        if (a.x <= z) {
          v += a.mass_var;
        }
      }
      return std::sqrt(v);
    }
    // Interval atoms are i.i.d. path contributions W_i / N.
    const auto n = static_cast<double>(paths);
    double s1 = 0.0;
    double s2 = 0.0;
    for (const auto& a : atoms) {
      if (a.x <= z && a.scale < 1.0) {
        s1 += a.weight;
        s2 += a.weight * a.weight;
      }
    }
    const double m = s1 / n;
    return std::sqrt(std::max(0.0, (s2 / n - m * m) / (n - 1.0)));
  }
};

/// Per-point density estimates on a grid.
struct DensityGrid {
  std::vector<double> x;
  std::vector<double> density;
  std::vector<double> std_error;
};

namespace detail {

struct Moments {
  double s1 = 0.0;
  double s2 = 0.0;
};

/// Chunk layout for n paths: fixed-size chunks, or one per thread.
inline std::size_t chunk_count(std::size_t n, const ExecutionPolicy& policy, std::size_t chunk) {
  if (policy.deterministic_reduction) {
    return std::max<std::size_t>(1, (n + chunk - 1) / chunk);
  }
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, policy.threads)), 1, std::max<std::size_t>(n, 1));
}

}  // namespace detail

inline constexpr std::size_t kParticleChunk = 4096;

/// Mean path weight at each grid point; each point and chunk has its own
/// substream (seed, point, chunk) and partial sums are combined pairwise.
inline DensityGrid estimate_density_grid(const PathSampler& base, const std::vector<double>& grid, std::size_t n,
                                         std::uint64_t seed, const ExecutionPolicy& policy = {}) {
  if (n < 2) {
    throw DomainError("estimate_density_grid: need at least 2 paths per point");
  }
  for (double x : grid) {
    if (!(x > 0.0)) {
      throw DomainError("estimate_density_grid: grid points must be positive");
    }
  }
  const std::size_t chunks = detail::chunk_count(n, policy, kParticleChunk);
  const std::size_t per = (n + chunks - 1) / chunks;
  std::vector<detail::Moments> parts(grid.size() * chunks);
  std::vector<PathSampler> samplers;
  samplers.reserve(grid.size());
  // Moments are taken about g(x), which every weight shares, to avoid
  // cancellation in the variance.
  std::vector<double> shifts;
  shifts.reserve(grid.size());
  for (double x : grid) {
    shifts.push_back(base.kernel().g(x));
    auto cfg = base.config();
    cfg.initial = InitialLaw::Point;
    cfg.x0 = x;
    cfg.absorption = base.absorption();
    samplers.emplace_back(base.kernel(), cfg, 0.0);
  }
  parallel_for(grid.size() * chunks, policy.threads, [&](std::size_t task) {
    const std::size_t point = task / chunks;
    const std::size_t c = task % chunks;
    auto rng = RandomStream::substream(seed, {point, c});
    const std::size_t begin = c * per;
    const std::size_t end = std::min(n, begin + per);
    const double shift = shifts[point];
    detail::Moments m;
    for (std::size_t i = begin; i < end; ++i) {
      const double w = samplers[point].sample_weight(rng) - shift;
      m.s1 += w;
      m.s2 += w * w;
    }
    parts[task] = m;
  });
  DensityGrid out;
  out.x = grid;
  out.density.resize(grid.size());
  out.std_error.resize(grid.size());
  std::vector<double> a(chunks);
  std::vector<double> b(chunks);
  const auto dn = static_cast<double>(n);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (std::size_t c = 0; c < chunks; ++c) {
      a[c] = parts[p * chunks + c].s1;
      b[c] = parts[p * chunks + c].s2;
    }
    const double mean = pairwise_sum(a) / dn;
    const double var = std::max(0.0, (pairwise_sum(b) / dn - mean * mean) * dn / (dn - 1.0));
    out.density[p] = shifts[p] + mean;
    out.std_error[p] = std::sqrt(var / dn);
  }
  return out;
}

/// Linear grid step, 2 step, ..., x_max.
inline std::vector<double> linear_grid(double step, double x_max) {
  if (!(step > 0.0) || !(x_max >= step)) {
    throw DomainError("linear_grid: need 0 < step <= x_max");
  }
  std::vector<double> g;
  const auto n = static_cast<std::size_t>(std::floor(x_max / step + 1e-9));
  g.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    g.push_back(static_cast<double>(i) * step);
  }
  return g;
}

/// Grid measure: the atom p0 at zero plus one atom per grid point carrying
/// density * cell width, where the cell of x_m is (x_{m-1}, x_m].
inline WeightedParticleMeasure grid_measure(const DensityGrid& d, double p0) {
  WeightedParticleMeasure m;
  m.mode = MeasureMode::PointwiseGrid;
  m.atoms.push_back({0.0, p0, 1.0, 0.0});
  double prev = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    const double width = d.x[i] - prev;
    prev = d.x[i];
    const double se = d.std_error[i] * width;
    m.atoms.push_back({d.x[i], d.density[i], width, se * se});
  }
  return m;
}

inline WeightedParticleMeasure estimate_density_measure(const CompoundModel& model, const std::vector<double>& grid,
                                                        std::size_t n, const PathSamplerConfig& cfg,
                                                        std::uint64_t seed, const ExecutionPolicy& policy = {}) {
  const PathSampler sampler(model, cfg);
  return grid_measure(estimate_density_grid(sampler, grid, n, seed, policy), sampler.kernel().p0());
}

/// N weighted atoms with x0 ~ Uniform[xa, xb]; the p0 atom is added when
/// xa = 0.
inline WeightedParticleMeasure estimate_measure_interval(const CompoundModel& model, double xa, double xb,
                                                         std::size_t n, PathSamplerConfig cfg, std::uint64_t seed,
                                                         const ExecutionPolicy& policy = {}) {
  if (!(xb > xa) || !(xa >= 0.0)) {
    throw DomainError("estimate_measure_interval: need 0 <= xa < xb");
  }
  if (n < 2) {
    throw DomainError("estimate_measure_interval: need at least 2 paths");
  }
  cfg.initial = InitialLaw::Interval;
  cfg.xa = xa;
  cfg.xb = xb;
  const PathSampler sampler(model, cfg);
  WeightedParticleMeasure m;
  m.mode = MeasureMode::Interval;
  m.paths = n;
  m.atoms.resize(n);
  const std::size_t chunks = detail::chunk_count(n, policy, kParticleChunk);
  const std::size_t per = (n + chunks - 1) / chunks;
  const double inv_n = 1.0 / static_cast<double>(n);
  parallel_for(chunks, policy.threads, [&](std::size_t c) {
    auto rng = RandomStream::substream(seed, {0, c});
    const std::size_t end = std::min(n, (c + 1) * per);
    for (std::size_t i = c * per; i < end; ++i) {
      PathSample p = sampler.simulate(rng);
      m.atoms[i] = {p.states.front(), p.weight, inv_n, 0.0};
    }
  });
  if (xa == 0.0) {
    m.atoms.push_back({0.0, sampler.kernel().p0(), 1.0, 0.0});
  }
  return m;
}

/// Generalized inverse over the sorted atoms.
inline double quantile_from_measure(const WeightedParticleMeasure& m, double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw DomainError("quantile_from_measure: p must lie in (0,1]");
  }
  double cum = 0.0;
  for (const auto& a : m.sorted()) {
    cum += a.mass();
    if (cum >= p) {
      return a.x;
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "quantile_from_measure: accumulated mass %.6g < %.6g; extend the grid", cum, p);
  throw TruncationError(buf);
}

struct MeasureQuantile {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double std_error = 0.0;
};

/// Point estimate plus the interval from inverting F +/- z SE(F).
inline MeasureQuantile quantile_ci_from_measure(const WeightedParticleMeasure& m, double p, double z = 1.959963984540054) {
  MeasureQuantile q;
  q.point = quantile_from_measure(m, p);
  const auto atoms = m.sorted();
  bool have_lo = false;
  bool have_hi = false;
  double cum = 0.0;
  double var = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  const auto n = static_cast<double>(m.paths);
  for (const auto& a : atoms) {
    cum += a.mass();
    double se = 0.0;
    if (m.mode == MeasureMode::PointwiseGrid) {
      var += a.mass_var;
      se = std::sqrt(var);
    } else if (a.scale < 1.0) {
      s1 += a.weight;
      s2 += a.weight * a.weight;
      const double mean = s1 / n;
      se = std::sqrt(std::max(0.0, (s2 / n - mean * mean) / (n - 1.0)));
    } else {
      const double mean = s1 / n;
      se = std::sqrt(std::max(0.0, (s2 / n - mean * mean) / (n - 1.0)));
    }
    if (!have_lo && cum + z * se >= p) {
      q.lower = a.x;
      have_lo = true;
    }
    if (!have_hi && cum - z * se >= p) {
      q.upper = a.x;
      have_hi = true;
    }
  }
  if (!have_hi) {
    q.upper = atoms.back().x;
  }
  q.std_error = (q.upper - q.lower) / (2.0 * z);
  return q;
}

struct RiskMeasures {
  double var = 0.0;
  double es = 0.0;
  double es_raw = 0.0;
  double srm = 0.0;
};

/// VaR by generalized inverse; ES self-normalized over atoms at or above VaR
/// (es_raw keeps the unnormalized tail sum); SRM = sum x_i phi(p_i) dp_i with
/// p_i the cumulative masses normalized by the total.
inline RiskMeasures risk_measures_from_measure(const WeightedParticleMeasure& m, double alpha, const SpectrumFn& phi) {
  RiskMeasures r;
  r.var = quantile_from_measure(m, alpha);
  const auto atoms = m.sorted();
  double tw = 0.0;
  double txw = 0.0;
  for (const auto& a : atoms) {
    if (a.x >= r.var) {
      tw += a.mass();
      txw += a.x * a.mass();
    }
  }
  if (!(tw > 0.0)) {
    throw StateError("risk_measures_from_measure: empty tail beyond VaR");
  }
  r.es = txw / tw;
  r.es_raw = txw;
  const double total = m.total_mass();
  double cum = 0.0;
  for (const auto& a : atoms) {
    const double dp = a.mass() / total;
    cum += dp;
    r.srm += a.x * phi(std::min(cum, 1.0)) * dp;
  }
  return r;
}

/// CSV with columns x, weight, cumulative (mass).
inline void write_measure_csv(const WeightedParticleMeasure& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out << "x,weight,cumulative\n";
  double cum = 0.0;
  char buf[96];
  for (const auto& a : m.sorted()) {
    cum += a.mass();
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g\n", a.x, a.weight, cum);
    out << buf;
  }
}

/// CSV with columns x, density, stderr.
inline void write_density_csv(const DensityGrid& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out << "x,density,stderr\n";
  char buf[96];
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g\n", d.x[i], d.density[i], d.std_error[i]);
    out << buf;
  }
}

}  // namespace lda
