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
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>

#include "lda/errors.hpp"
#include "lda/random.hpp"
#include "lda/special.hpp"

namespace lda {

/// ln X ~ N(mu, sigma^2).
struct LogNormal {
  double mu = 0.0;
  double sigma = 1.0;
};

/// Lomax-type Pareto: survival (1 + x/scale)^(-tail_index), support (0, inf).
struct Pareto {
  double tail_index = 2.0;
  double scale = 1.0;
};

/// Point mass at `atom`.
struct Degenerate {
  double atom = 1.0;
};

struct SeverityEval {
  double density;
  double cdf;
  double survival;
};

/// Loss-size distribution. Immutable after construction.
class SeverityModel {
 public:
  using Kind = std::variant<LogNormal, Pareto, Degenerate>;

  SeverityModel(Kind kind) : kind_(kind) { validate(); }  // NOLINT(google-explicit-constructor)

  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }

  template <class T>
  [[nodiscard]] bool is() const noexcept {
    return std::holds_alternative<T>(kind_);
  }

  [[nodiscard]] bool has_density() const noexcept { return !is<Degenerate>(); }

  /// Regular-variation index of the survival function, when there is one.
  [[nodiscard]] std::optional<double> tail_index() const noexcept {
    if (const auto* p = std::get_if<Pareto>(&kind_)) {
      return p->tail_index;
    }
    return std::nullopt;
  }

  [[nodiscard]] double density(double x) const {
    check_finite(x);
    return std::visit(
        [x](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if (x <= 0.0) {
            return 0.0;
          }
          if constexpr (std::is_same_v<T, LogNormal>) {
            const double z = (std::log(x) - m.mu) / m.sigma;
            return normal_pdf(z) / (x * m.sigma);
          } else if constexpr (std::is_same_v<T, Pareto>) {
            return m.tail_index / m.scale * std::pow(1.0 + x / m.scale, -m.tail_index - 1.0);
          } else {
            return 0.0;
          }
        },
        kind_);
  }

  [[nodiscard]] double cdf(double x) const {
    check_finite(x);
    return std::visit(
        [x](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Degenerate>) {
            return x >= m.atom ? 1.0 : 0.0;
          } else {
            if (x <= 0.0) {
              return 0.0;
            }
            if constexpr (std::is_same_v<T, LogNormal>) {
              return normal_cdf((std::log(x) - m.mu) / m.sigma);
            } else {
              return -std::expm1(-m.tail_index * std::log1p(x / m.scale));
            }
          }
        },
        kind_);
  }

  [[nodiscard]] double survival(double x) const {
    check_finite(x);
    return std::visit(
        [x](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Degenerate>) {
            return x >= m.atom ? 0.0 : 1.0;
          } else {
            if (x <= 0.0) {
              return 1.0;
            }
            if constexpr (std::is_same_v<T, LogNormal>) {
              return normal_sf((std::log(x) - m.mu) / m.sigma);
            } else {
              return std::exp(-m.tail_index * std::log1p(x / m.scale));
            }
          }
        },
        kind_);
  }

  /// (density, cdf, survival) at x > 0.
  [[nodiscard]] SeverityEval eval(double x) const {
    check_finite(x);
    if (!(x > 0.0)) {
      throw DomainError("severity_eval: x must be positive");
    }
    return {density(x), cdf(x), survival(x)};
  }

  [[nodiscard]] double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
      throw DomainError("severity_quantile: p must lie in (0,1)");
    }
    return std::visit(
        [p](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, LogNormal>) {
            return std::exp(m.mu + m.sigma * normal_quantile(p));
          } else if constexpr (std::is_same_v<T, Pareto>) {
            return m.scale * std::expm1(-std::log1p(-p) / m.tail_index);
          } else {
            return m.atom;
          }
        },
        kind_);
  }

  [[nodiscard]] double mean() const noexcept {
    return std::visit(
        [](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, LogNormal>) {
            return std::exp(m.mu + 0.5 * m.sigma * m.sigma);
          } else if constexpr (std::is_same_v<T, Pareto>) {
            return m.tail_index > 1.0 ? m.scale / (m.tail_index - 1.0)
                                      : std::numeric_limits<double>::infinity();
          } else {
            return m.atom;
          }
        },
        kind_);
  }

  /// Partial first moment E[X; X <= x].
  [[nodiscard]] double partial_moment(double x) const {
    check_finite(x);
    return std::visit(
        [x](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Degenerate>) {
            return x >= m.atom ? m.atom : 0.0;
          } else {
            if (x <= 0.0) {
              return 0.0;
            }
            if constexpr (std::is_same_v<T, LogNormal>) {
              const double c = (std::log(x) - m.mu - m.sigma * m.sigma) / m.sigma;
              return std::exp(m.mu + 0.5 * m.sigma * m.sigma) * normal_cdf(c);
            } else {
              const double a = m.tail_index;
              const double lu = std::log1p(x / m.scale);
              const double tail_term = std::expm1(-a * lu);
              if (a == 1.0) {
                return m.scale * (lu + tail_term);
              }
              return m.scale * (a * std::expm1((1.0 - a) * lu) / (1.0 - a) + tail_term);
            }
          }
        },
        kind_);
  }

  /// Upper partial moment E[X; X > x]; +infinity when the mean is infinite.
  [[nodiscard]] double upper_partial_moment(double x) const {
    check_finite(x);
    return std::visit(
        [x, this](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, LogNormal>) {
            if (x <= 0.0) {
              return mean();
            }
            const double c = (std::log(x) - m.mu - m.sigma * m.sigma) / m.sigma;
            return std::exp(m.mu + 0.5 * m.sigma * m.sigma) * normal_sf(c);
          } else if constexpr (std::is_same_v<T, Pareto>) {
            if (m.tail_index <= 1.0) {
              return std::numeric_limits<double>::infinity();
            }
            const double xp = std::max(x, 0.0);
            return survival(xp) * (xp + (xp + m.scale) / (m.tail_index - 1.0));
          } else {
            return x < m.atom ? m.atom : 0.0;
          }
        },
        kind_);
  }

  /// E[min(X, x)] = integral of the survival function over [0, x].
  [[nodiscard]] double limited_expectation(double x) const {
    return partial_moment(x) + x * survival(x);
  }

  /// One draw. LogNormal uses the Box-Muller cosine branch; Pareto inverts the
  /// survival function with U on (0,1].
  template <UniformSource Rng>
  double sample(Rng& rng) const {
    return std::visit(
        [&rng](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, LogNormal>) {
            return std::exp(m.mu + m.sigma * standard_normal(rng));
          } else if constexpr (std::is_same_v<T, Pareto>) {
            const double u = rng.uniform();
            return m.scale * std::expm1(-std::log(u) / m.tail_index);
          } else {
            return m.atom;
          }
        },
        kind_);
  }

  /// Inverse of y -> F(y) restricted to (0, x): returns y with F(y) = u F(x).
  [[nodiscard]] double truncated_quantile(double u, double x) const {
    const double target = u * cdf(x);
    if (!(target > 0.0)) {
      return 0.0;
    }
    if (target >= 1.0) {
      return x;
    }
    return std::min(quantile(target), x);
  }

  /// Inverse of the truncated size-biased law with density y f(y) / PM(x) on
  /// (0, x): returns y with PM(y) = u PM(x).
  [[nodiscard]] double size_biased_quantile(double u, double x) const {
    if (const auto* ln = std::get_if<LogNormal>(&kind_)) {
      const double s2 = ln->sigma * ln->sigma;
      const double c = (std::log(x) - ln->mu - s2) / ln->sigma;
      const double target = u * normal_cdf(c);
      if (!(target > 0.0)) {
        return 0.0;
      }
      const double y = std::exp(ln->mu + s2 + ln->sigma * normal_quantile(std::min(target, 1.0 - 1e-16)));
      return std::min(y, x);
    }
    if (is<Degenerate>()) {
      return std::get<Degenerate>(kind_).atom;
    }
    // Safeguarded Newton on PM(y) - u PM(x); PM is increasing with slope y f(y).
    const double target = u * partial_moment(x);
    double lo = 0.0;
    double hi = x;
    double y = 0.5 * x;
    for (int it = 0; it < 200; ++it) {
      const double r = partial_moment(y) - target;
      if (r > 0.0) {
        hi = y;
      } else {
        lo = y;
      }
      const double slope = y * density(y);
      double next = slope > 0.0 ? y - r / slope : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) {
        next = 0.5 * (lo + hi);
      }
      if (std::abs(next - y) <= 1e-14 * y || hi - lo <= 1e-15 * x) {
        return next;
      }
      y = next;
    }
    return y;
  }

  /// Canonical text form, e.g. "lognormal(mu=2,sigma=0.5)".
  [[nodiscard]] std::string describe() const {
    char buf[128];
    std::visit(
        [&buf](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, LogNormal>) {
            std::snprintf(buf, sizeof buf, "lognormal(mu=%.17g,sigma=%.17g)", m.mu, m.sigma);
          } else if constexpr (std::is_same_v<T, Pareto>) {
            std::snprintf(buf, sizeof buf, "pareto(a=%.17g,scale=%.17g)", m.tail_index, m.scale);
          } else {
            std::snprintf(buf, sizeof buf, "degenerate(atom=%.17g)", m.atom);
          }
        },
        kind_);
    return buf;
  }

 private:
  static void check_finite(double x) {
    if (!std::isfinite(x)) {
      throw DomainError("severity: argument must be finite");
    }
  }

  void validate() const {
    std::visit(
        [](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, LogNormal>) {
            if (!std::isfinite(m.mu) || !(m.sigma > 0.0) || !std::isfinite(m.sigma)) {
              throw DomainError("lognormal severity needs finite mu and sigma > 0");
            }
          } else if constexpr (std::is_same_v<T, Pareto>) {
            if (!(m.tail_index > 0.0) || !(m.scale > 0.0) || !std::isfinite(m.tail_index) ||
                !std::isfinite(m.scale)) {
              throw DomainError("pareto severity needs tail index > 0 and scale > 0");
            }
          } else {
            if (!(m.atom > 0.0) || !std::isfinite(m.atom)) {
              throw DomainError("degenerate severity needs an atom > 0");
            }
          }
        },
        kind_);
  }

  Kind kind_;
};

}  // namespace lda
