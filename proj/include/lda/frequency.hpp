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
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "lda/errors.hpp"
#include "lda/random.hpp"

namespace lda {

struct Poisson {
  double rate = 1.0;
};

struct Binomial {
  int trials = 1;
  double q = 0.5;
};

/// pmf Gamma(r+n)/(Gamma(r) n!) (1+beta)^(-r) (beta/(1+beta))^n.
struct NegativeBinomial {
  double r = 1.0;
  double beta = 1.0;
};

/// Consul's generalized Poisson: p_n = lambda (lambda + n theta)^(n-1) e^(-lambda - n theta) / n!.
/// For theta < 0 the support stops at the largest m with lambda + theta m > 0
/// and the truncated masses are renormalized.
struct GeneralizedPoisson {
  double lambda = 1.0;
  double theta = 0.0;
};

/// (a, b, p0) of the Panjer class p_n = (a + b/n) p_{n-1}. Setting `p1`
/// moves to the (a,b,1) class, where the recursion starts at n = 2.
struct PanjerParams {
  double a = 0.0;
  double b = 0.0;
  double p0 = 1.0;
  std::optional<double> p1;

  [[nodiscard]] double first_mass() const noexcept { return p1 ? *p1 : (a + b) * p0; }

  /// p1 - (a + b) p0; zero for the (a,b,0) class.
  [[nodiscard]] double first_term() const noexcept { return p1 ? *p1 - (a + b) * p0 : 0.0; }

  /// p_0..p_n regenerated from the recursion.
  [[nodiscard]] std::vector<double> regenerate(int n) const {
    std::vector<double> p(static_cast<std::size_t>(n) + 1);
    p[0] = p0;
    for (int k = 1; k <= n; ++k) {
      p[k] = k == 1 ? first_mass() : std::max(0.0, (a + b / k) * p[k - 1]);
    }
    return p;
  }

  /// E[z^N] for z in [0, 1].
  [[nodiscard]] double pgf(double z) const {
    if (!p1) {
      if (a == 0.0) {
        return p0 * std::exp(b * z);
      }
      return std::pow((1.0 - a * z) / (1.0 - a), -(a + b) / a);
    }
    double s = p0;
    double pn = first_mass();
    double zn = z;
    for (int n = 1; n < 100000; ++n) {
      const double term = pn * zn;
      s += term;
      if (n > 1 && term < 1e-18 * s && (a + b / (n + 1)) < 1.0) {
        break;
      }
      pn = std::max(0.0, (a + b / (n + 1)) * pn);
      zn *= z;
      if (pn == 0.0 || zn == 0.0) {
        break;
      }
    }
    return s;
  }
};

namespace detail {

inline double gpd_log_term(double lambda, double theta, int n) {
  if (n == 0) {
    return -lambda;
  }
  return std::log(lambda) + (n - 1) * std::log(lambda + n * theta) - lambda - n * theta -
         std::lgamma(n + 1.0);
}

/// Largest m with lambda + theta m > 0 (theta < 0), else -1 for unbounded.
inline int gpd_support_max(double lambda, double theta) {
  if (theta >= 0.0) {
    return -1;
  }
  int m = static_cast<int>(std::floor(-lambda / theta));
  while (m > 0 && lambda + theta * m <= 0.0) {
    --m;
  }
  return m;
}

/// Sum of the untruncated-formula masses over the admissible support.
inline double gpd_normalizer(double lambda, double theta) {
  if (theta >= 0.0 || lambda <= 0.0) {
    return 1.0;
  }
  const int m = gpd_support_max(lambda, theta);
  double s = 0.0;
  for (int n = 0; n <= m; ++n) {
    s += std::exp(gpd_log_term(lambda, theta, n));
  }
  return s;
}

}  // namespace detail

/// GPD mass at n, including the theta < 0 truncation and renormalization.
inline double gpd_pmf(double lambda, double theta, int n) {
  if (n < 0 || lambda <= 0.0) {
    return 0.0;
  }
  const int m = detail::gpd_support_max(lambda, theta);
  if (m >= 0 && n > m) {
    return 0.0;
  }
  return std::exp(detail::gpd_log_term(lambda, theta, n)) / detail::gpd_normalizer(lambda, theta);
}

/// Counting distribution of the annual number of losses. Immutable after
/// construction; carries a precomputed inverse-cdf table for sampling.
class FrequencyModel {
 public:
  using Kind = std::variant<Poisson, Binomial, NegativeBinomial, GeneralizedPoisson>;

  /// Tail mass left out of the pmf table.
  static constexpr double kTableTail = 1e-12;

  FrequencyModel(Kind kind) : kind_(kind) {  // NOLINT(google-explicit-constructor)
    validate();
    build_table();
  }

  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }

  template <class T>
  [[nodiscard]] bool is() const noexcept {
    return std::holds_alternative<T>(kind_);
  }

  [[nodiscard]] double pmf(int n) const {
    if (n < 0) {
      throw DomainError("frequency_pmf: n must be non-negative");
    }
    return std::visit(
        [n](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Poisson>) {
            if (m.rate == 0.0) {
              return n == 0 ? 1.0 : 0.0;
            }
            return std::exp(n * std::log(m.rate) - m.rate - std::lgamma(n + 1.0));
          } else if constexpr (std::is_same_v<T, Binomial>) {
            if (n > m.trials) {
              return 0.0;
            }
            return std::exp(std::lgamma(m.trials + 1.0) - std::lgamma(n + 1.0) -
                            std::lgamma(m.trials - n + 1.0) + n * std::log(m.q) +
                            (m.trials - n) * std::log1p(-m.q));
          } else if constexpr (std::is_same_v<T, NegativeBinomial>) {
            return std::exp(std::lgamma(m.r + n) - std::lgamma(m.r) - std::lgamma(n + 1.0) -
                            m.r * std::log1p(m.beta) + n * (std::log(m.beta) - std::log1p(m.beta)));
          } else {
            return gpd_pmf(m.lambda, m.theta, n);
          }
        },
        kind_);
  }

  [[nodiscard]] double mean() const noexcept {
    return std::visit(
        [this](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Poisson>) {
            return m.rate;
          } else if constexpr (std::is_same_v<T, Binomial>) {
            return m.trials * m.q;
          } else if constexpr (std::is_same_v<T, NegativeBinomial>) {
            return m.r * m.beta;
          } else {
            if (m.theta >= 0.0) {
              return m.lambda / (1.0 - m.theta);
            }
            return table_moment(1);
          }
        },
        kind_);
  }

  /// Second factorial moment E[N(N-1)].
  [[nodiscard]] double factorial_moment2() const noexcept {
    return std::visit(
        [this](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Poisson>) {
            return m.rate * m.rate;
          } else if constexpr (std::is_same_v<T, Binomial>) {
            return static_cast<double>(m.trials) * (m.trials - 1) * m.q * m.q;
          } else if constexpr (std::is_same_v<T, NegativeBinomial>) {
            return m.r * (m.r + 1.0) * m.beta * m.beta;
          } else {
            if (m.theta >= 0.0) {
              const double mu = m.lambda / (1.0 - m.theta);
              const double var = m.lambda / std::pow(1.0 - m.theta, 3);
              return var + mu * mu - mu;
            }
            return table_moment(2);
          }
        },
        kind_);
  }

  /// Probability generating function E[z^N] for z in [0, 1].
  [[nodiscard]] double pgf(double z) const {
    return std::visit(
        [z, this](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Poisson>) {
            return std::exp(m.rate * (z - 1.0));
          } else if constexpr (std::is_same_v<T, Binomial>) {
            return std::pow(1.0 - m.q + m.q * z, m.trials);
          } else if constexpr (std::is_same_v<T, NegativeBinomial>) {
            return std::pow(1.0 - m.beta * (z - 1.0), -m.r);
          } else {
            double s = 0.0;
            double zn = 1.0;
            for (std::size_t n = 0; n < table_->pmf.size(); ++n) {
              s += table_->pmf[n] * zn;
              zn *= z;
            }
            return s;
          }
        },
        kind_);
  }

  /// (a, b, p0) for the three classical Panjer members.
  [[nodiscard]] PanjerParams panjer_params() const {
    return std::visit(
        [](const auto& m) -> PanjerParams {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Poisson>) {
            return {0.0, m.rate, std::exp(-m.rate), std::nullopt};
          } else if constexpr (std::is_same_v<T, Binomial>) {
            const double odds = m.q / (1.0 - m.q);
            return {-odds, (m.trials + 1) * odds, std::pow(1.0 - m.q, m.trials), std::nullopt};
          } else if constexpr (std::is_same_v<T, NegativeBinomial>) {
            const double a = m.beta / (1.0 + m.beta);
            return {a, (m.r - 1.0) * a, std::pow(1.0 + m.beta, -m.r), std::nullopt};
          } else {
            throw UnsupportedError(
                "generalized Poisson is not an (a,b,0) member; use the generalized recursion");
          }
        },
        kind_);
  }

  /// Truncated pmf table p_0..p_K (tail mass beyond K below kTableTail).
  [[nodiscard]] const std::vector<double>& pmf_table() const noexcept { return table_->pmf; }

  /// Draw a count. Poisson with rate <= 30 uses the multiplicative-uniform
  /// loop; every other case inverts the cdf table.
  template <UniformSource Rng>
  int sample(Rng& rng) const {
    if (const auto* p = std::get_if<Poisson>(&kind_); p != nullptr && p->rate <= 30.0) {
      if (p->rate == 0.0) {
        return 0;
      }
      const double limit = std::exp(-p->rate);
      int count = 0;
      double prod = 1.0;
      while (prod > limit) {
        ++count;
        prod *= rng.uniform();
      }
      return count - 1;
    }
    const double u = rng.uniform();
    const auto& cdf = table_->cdf;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) {
      return static_cast<int>(cdf.size()) - 1;
    }
    return static_cast<int>(it - cdf.begin());
  }

  [[nodiscard]] std::string describe() const {
    char buf[128];
    std::visit(
        [&buf](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Poisson>) {
            std::snprintf(buf, sizeof buf, "poisson(lambda=%.17g)", m.rate);
          } else if constexpr (std::is_same_v<T, Binomial>) {
            std::snprintf(buf, sizeof buf, "binomial(m=%d,q=%.17g)", m.trials, m.q);
          } else if constexpr (std::is_same_v<T, NegativeBinomial>) {
            std::snprintf(buf, sizeof buf, "negbin(r=%.17g,beta=%.17g)", m.r, m.beta);
          } else {
            std::snprintf(buf, sizeof buf, "gpd(lambda=%.17g,theta=%.17g)", m.lambda, m.theta);
          }
        },
        kind_);
    return buf;
  }

 private:
  struct Table {
    std::vector<double> pmf;
    std::vector<double> cdf;
  };

  void validate() const {
    std::visit(
        [](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Poisson>) {
            if (!(m.rate >= 0.0) || !std::isfinite(m.rate)) {
              throw DomainError("poisson rate must be >= 0");
            }
          } else if constexpr (std::is_same_v<T, Binomial>) {
            if (m.trials < 1 || !(m.q > 0.0 && m.q < 1.0)) {
              throw DomainError("binomial needs trials >= 1 and q in (0,1)");
            }
          } else if constexpr (std::is_same_v<T, NegativeBinomial>) {
            if (!(m.r > 0.0) || !(m.beta > 0.0)) {
              throw DomainError("negative binomial needs r > 0 and beta > 0");
            }
          } else {
            if (!(m.lambda > 0.0) || !std::isfinite(m.lambda)) {
              throw DomainError("generalized Poisson needs lambda > 0");
            }
            if (!(m.theta >= -1.0 && m.theta < 1.0)) {
              throw DomainError("generalized Poisson needs -1 <= theta < 1");
            }
            if (m.theta < 0.0 && detail::gpd_support_max(m.lambda, m.theta) < 4) {
              throw DomainError("generalized Poisson with theta < 0 needs support max m >= 4");
            }
          }
        },
        kind_);
  }

  void build_table() {
    auto table = std::make_shared<Table>();
    double cum = 0.0;
    const double mu_guess = std::visit(
        [](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Poisson>) {
            return m.rate;
          } else if constexpr (std::is_same_v<T, Binomial>) {
            return m.trials * m.q;
          } else if constexpr (std::is_same_v<T, NegativeBinomial>) {
            return m.r * m.beta;
          } else {
            return m.lambda / (1.0 - m.theta);
          }
        },
        kind_);
    std::optional<int> support_max;
    if (const auto* b = std::get_if<Binomial>(&kind_)) {
      support_max = b->trials;
    } else if (const auto* g = std::get_if<GeneralizedPoisson>(&kind_); g != nullptr && g->theta < 0.0) {
      support_max = detail::gpd_support_max(g->lambda, g->theta);
    }
    constexpr int kHardCap = 1 << 22;
    for (int n = 0; n < kHardCap; ++n) {
      if (support_max && n > *support_max) {
        break;
      }
      const double p = pmf(n);
      table->pmf.push_back(p);
      cum += p;
      table->cdf.push_back(cum);
      if (!support_max && n > mu_guess && 1.0 - cum < kTableTail) {
        break;
      }
    }
    table_ = std::move(table);
  }

  [[nodiscard]] double table_moment(int order) const noexcept {
    double s = 0.0;
    for (std::size_t n = 0; n < table_->pmf.size(); ++n) {
      const double dn = static_cast<double>(n);
      s += table_->pmf[n] * (order == 1 ? dn : dn * (dn - 1.0));
    }
    return s;
  }

  Kind kind_;
  std::shared_ptr<const Table> table_;
};

}  // namespace lda
