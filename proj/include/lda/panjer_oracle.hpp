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
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "lda/compound_mc.hpp"
#include "lda/errors.hpp"
#include "lda/frequency.hpp"
#include "lda/severity.hpp"

namespace lda {

enum class Discretization { Rounding, LocalMomentMatching };

/// Severity masses f_0..f_K on the lattice {0, step, 2 step, ...}.
struct DiscreteSeverity {
  double step = 1.0;
  std::vector<double> masses;
  Discretization method = Discretization::LocalMomentMatching;

  [[nodiscard]] double total() const {
    double s = 0.0;
    for (double m : masses) {
      s += m;
    }
    return s;
  }
};

namespace detail {

/// P(a < X <= b), taken from whichever tail keeps the digits.
inline double cell_mass(const SeverityModel& sev, double a, double b) {
  if (sev.survival(a) < 0.5) {
    return sev.survival(a) - sev.survival(b);
  }
  return sev.cdf(b) - sev.cdf(a);
}

/// E[X; a < X <= b].
inline double cell_moment(const SeverityModel& sev, double a, double b) {
  if (sev.survival(a) < 0.5 && std::isfinite(sev.mean())) {
    return sev.upper_partial_moment(a) - sev.upper_partial_moment(b);
  }
  return sev.partial_moment(b) - sev.partial_moment(a);
}

}  // namespace detail

/// Lattice version of `sev` with K + 1 nodes.
///
/// Rounding sends the mass of ((j - 1/2) step, (j + 1/2) step] to node j.
/// Local moment matching splits the mass of each cell (j step, (j + 1) step]
/// between its two end nodes so that the cell's mass and first moment are
/// kept.
inline DiscreteSeverity discretize_severity(const SeverityModel& sev, double step, std::size_t K,
                                            Discretization method = Discretization::LocalMomentMatching) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw DomainError("discretize_severity: step must be positive");
  }
  if (K < 1) {
    throw DomainError("discretize_severity: K must be >= 1");
  }
  DiscreteSeverity out;
  out.step = step;
  out.method = method;
  out.masses.assign(K + 1, 0.0);
  if (method == Discretization::Rounding) {
    out.masses[0] = sev.cdf(0.5 * step);
    for (std::size_t j = 1; j <= K; ++j) {
      const double x = static_cast<double>(j) * step;
      out.masses[j] = std::max(0.0, detail::cell_mass(sev, x - 0.5 * step, x + 0.5 * step));
    }
    return out;
  }
  for (std::size_t j = 0; j < K; ++j) {
    const double a = static_cast<double>(j) * step;
    const double b = a + step;
    const double m = detail::cell_mass(sev, a, b);
    if (!(m > 0.0)) {
      continue;
    }
    const double m1 = detail::cell_moment(sev, a, b);
    const double up = std::clamp((m1 - a * m) / step, 0.0, m);
    out.masses[j] += m - up;
    out.masses[j + 1] += up;
  }
  return out;
}

/// Compound masses g_0..g_M on the lattice {0, step, ...}.
struct CompoundPmf {
  double step = 1.0;
  std::vector<double> masses;
  std::string model_hash;

  [[nodiscard]] double total() const {
    double s = 0.0;
    for (double g : masses) {
      s += g;
    }
    return s;
  }

  [[nodiscard]] std::vector<double> cdf() const {
    std::vector<double> c(masses.size());
    double s = 0.0;
    for (std::size_t k = 0; k < masses.size(); ++k) {
      s += masses[k];
      c[k] = s;
    }
    return c;
  }

  /// Density proxy g_k / step at x = k step.
  [[nodiscard]] double density_at(double x) const {
    const auto k = static_cast<std::size_t>(std::llround(x / step));
    return k < masses.size() ? masses[k] / step : 0.0;
  }

  /// P(Z > x) summed from the far end of the lattice, with half the mass of
  /// a node lying exactly at x.
  [[nodiscard]] double tail_mass(double x) const {
    const double pos = x / step;
    const auto k = static_cast<std::size_t>(std::floor(pos));
    const bool on_node = std::abs(pos - std::round(pos)) < 1e-9;
    double s = 0.0;
    for (std::size_t i = masses.size(); i-- > k + 1;) {
      s += masses[i];
    }
    if (on_node) {
      const auto kn = static_cast<std::size_t>(std::llround(pos));
      if (kn == k + 1 && kn < masses.size()) {
        s -= 0.5 * masses[kn];
      } else if (kn == k && k < masses.size()) {
        s += 0.5 * masses[k];
      }
    }
    return s;
  }

  /// Sum of x g / sum of g over lattice points x >= q.
  [[nodiscard]] double tail_mean(double q) const {
    auto k0 = static_cast<std::size_t>(std::ceil(q / step - 1e-9));
    double w = 0.0;
    double xw = 0.0;
    for (std::size_t k = k0; k < masses.size(); ++k) {
      w += masses[k];
      xw += static_cast<double>(k) * step * masses[k];
    }
    if (!(w > 0.0)) {
      throw TruncationError("oracle tail mean: no mass at or above the quantile; raise M");
    }
    return xw / w;
  }
};

/// Discrete Panjer recursion
///   g_k = [p1' f_k + sum_{j=1..k} (a + b j/k) f_j g_{k-j}] / (1 - a f_0),
/// g_0 = pgf(f_0), with p1' = p1 - (a + b) p0 (zero in the (a,b,0) class).
inline CompoundPmf panjer_discrete(const PanjerParams& freq, const DiscreteSeverity& sev, std::size_t M) {
  const double f0 = sev.masses.empty() ? 0.0 : sev.masses[0];
  const double denom = 1.0 - freq.a * f0;
  if (!(denom > 0.0)) {
    throw InstabilityError("panjer_discrete: 1 - a f0 <= 0");
  }
  std::vector<double> f(M + 1, 0.0);
  std::copy_n(sev.masses.begin(), std::min(sev.masses.size(), M + 1), f.begin());
  std::vector<double> jf(M + 1);
  for (std::size_t j = 0; j <= M; ++j) {
    jf[j] = static_cast<double>(j) * f[j];
  }
  const double p1p = freq.first_term();
  CompoundPmf out;
  out.step = sev.step;
  out.masses.assign(M + 1, 0.0);
  auto& g = out.masses;
  g[0] = freq.pgf(f0);
  for (std::size_t k = 1; k <= M; ++k) {
    double sa = 0.0;
    double sb = 0.0;
    const double* gk = g.data() + k;
    for (std::size_t j = 1; j <= k; ++j) {
      const double gkj = *(gk - j);
      sa += f[j] * gkj;
      sb += jf[j] * gkj;
    }
    const double v = (p1p * f[k] + freq.a * sa + freq.b * sb / static_cast<double>(k)) / denom;
    g[k] = std::max(0.0, v);
  }
  return out;
}

/// Compound pmf for generalized-Poisson counts.
///
/// Uses n p_n(l) = (l / (l + theta)) (l + n theta) p_{n-1}(l + theta), which
/// gives, for the compound pmf G^(l) with rate l,
///   G^(l)_k = c(l) sum_{i=0..k} (theta + l i / k) f_i G^(l+theta)_{k-i},
/// c(l) = (l / (l + theta)) C(l + theta) / C(l) with C the support
/// normalizer. Layers l_j = lambda + j theta are filled from the deepest one
/// up; the deepest keeps only its k = 0 entry.
inline CompoundPmf gpd_panjer_discrete(double lambda, double theta, const DiscreteSeverity& sev,
                                       std::size_t M) {
  const FrequencyModel top{GeneralizedPoisson{lambda, theta}};
  std::vector<double> f(M + 1, 0.0);
  std::copy_n(sev.masses.begin(), std::min(sev.masses.size(), M + 1), f.begin());
  const double f0 = f[0];

  int depth = 0;
  if (theta < 0.0) {
    depth = detail::gpd_support_max(lambda, theta);
  } else {
    // Past the mean, stop once the count masses fall below 1e-20.
    const double mean = top.mean();
    depth = 1;
    while (depth < 100000 && (depth <= mean || gpd_pmf(lambda, theta, depth) > 1e-20)) {
      ++depth;
    }
  }

  // pgf at f0 of GPD(l, theta), normalized over its own support.
  auto layer_g0 = [&](double l) {
    if (l <= 0.0) {
      return 1.0;
    }
    const int m = detail::gpd_support_max(l, theta);
    const double c = detail::gpd_normalizer(l, theta);
    double s = 0.0;
    double zn = 1.0;
    const int n_max = m >= 0 ? m : 100000;
    for (int n = 0; n <= n_max; ++n) {
      const double term = std::exp(detail::gpd_log_term(l, theta, n)) * zn;
      s += term;
      zn *= f0;
      if (m < 0 && n > 2 && (term < 1e-18 * s || zn == 0.0)) {
        break;
      }
    }
    return s / c;
  };

  std::vector<double> deeper(M + 1, 0.0);
  deeper[0] = layer_g0(lambda + depth * theta);
  std::vector<double> cur(M + 1, 0.0);
  for (int j = depth - 1; j >= 0; --j) {
    const double lj = lambda + j * theta;
    const double ln = lj + theta;
    std::fill(cur.begin(), cur.end(), 0.0);
    if (!(lj > 0.0) || !(ln > 0.0)) {
      cur[0] = 1.0;
      deeper.swap(cur);
      continue;
    }
    const double coef = lj / ln * detail::gpd_normalizer(ln, theta) / detail::gpd_normalizer(lj, theta);
    cur[0] = layer_g0(lj);
    for (std::size_t k = 1; k <= M; ++k) {
      double s0 = 0.0;
      double s1 = 0.0;
      for (std::size_t i = 0; i <= k; ++i) {
        const double v = f[i] * deeper[k - i];
        s0 += v;
        s1 += static_cast<double>(i) * v;
      }
      cur[k] = std::max(0.0, coef * (theta * s0 + lj * s1 / static_cast<double>(k)));
    }
    deeper.swap(cur);
  }
  CompoundPmf out;
  out.step = sev.step;
  out.masses = std::move(deeper);
  return out;
}

/// Oracle pmf for any supported compound model.
inline CompoundPmf panjer_oracle(const CompoundModel& model, double step, std::size_t M,
                                 Discretization method = Discretization::LocalMomentMatching) {
  const auto sev = discretize_severity(model.severity, step, M, method);
  CompoundPmf out;
  if (const auto* g = std::get_if<GeneralizedPoisson>(&model.frequency.kind())) {
    out = gpd_panjer_discrete(g->lambda, g->theta, sev, M);
  } else {
    out = panjer_discrete(model.frequency.panjer_params(), sev, M);
  }
  out.model_hash = model.hash();
  return out;
}

struct CdfQuantile {
  std::vector<double> cdf;
  double quantile = 0.0;
};

/// Smallest lattice point whose cumulative mass reaches alpha.
inline CdfQuantile compound_cdf_quantile(const CompoundPmf& pmf, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("compound_cdf_quantile: alpha must lie in (0,1]");
  }
  CdfQuantile out;
  out.cdf = pmf.cdf();
  // Cumulative sums of a pmf that sums to 1 can land a few ulps short.
  const double target = alpha - 1e-13;
  const auto it = std::lower_bound(out.cdf.begin(), out.cdf.end(), target);
  if (it == out.cdf.end()) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "compound_cdf_quantile: accumulated mass %.12g < alpha %.12g; raise M", out.cdf.back(),
                  alpha);
    throw TruncationError(buf);
  }
  out.quantile = static_cast<double>(it - out.cdf.begin()) * pmf.step;
  return out;
}

/// CSV with columns x, pmf, cdf.
inline void write_pmf_csv(const CompoundPmf& pmf, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out << "x,pmf,cdf\n";
  double cum = 0.0;
  char buf[96];
  for (std::size_t k = 0; k < pmf.masses.size(); ++k) {
    cum += pmf.masses[k];
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.12g\n", static_cast<double>(k) * pmf.step, pmf.masses[k],
                  cum);
    out << buf;
  }
}

}  // namespace lda
