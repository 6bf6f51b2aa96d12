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
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "lda/compound_mc.hpp"
#include "lda/errors.hpp"
#include "lda/quadrature.hpp"

namespace lda {

/// Weight function on [0, 1] used by spectral risk measures.
using SpectrumFn = std::function<double(double)>;

struct SlaResult {
  double alpha = 0.0;
  double var_first = 0.0;
  std::optional<double> var_second;
  std::optional<double> es;
  std::optional<double> srm;
  std::map<std::string, double> diagnostics;
};

/// Severity level 1 - (1 - alpha)/E[N] targeted by the single-loss approximation.
inline double sla_severity_level(const CompoundModel& model, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("sla: alpha must lie in (0,1)");
  }
  const double en = model.frequency.mean();
  if (!(en > 0.0)) {
    throw LevelOutOfRangeError("sla: E[N] must be positive");
  }
  const double tail = (1.0 - alpha) / en;
  if (!(tail < 1.0)) {
    throw LevelOutOfRangeError("sla: (1 - alpha)/E[N] >= 1");
  }
  return 1.0 - tail;
}

/// VaR_alpha(Z) ~ F^{-1}(1 - (1 - alpha)/E[N]).
inline double sla_var_first_order(const CompoundModel& model, double alpha) {
  return model.severity.quantile(sla_severity_level(model, alpha));
}

/// c_beta = (1 - beta) Gamma(1 - 1/beta)^2 / (2 Gamma(1 - 2/beta)), c_1 = 1.
inline double c_beta(double beta) {
  if (!(beta >= 1.0) || !std::isfinite(beta)) {
    throw DomainError("c_beta: beta must be >= 1");
  }
  if (beta == 1.0) {
    return 1.0;
  }
  const double g1 = std::tgamma(1.0 - 1.0 / beta);
  const double g2 = std::tgamma(1.0 - 2.0 / beta);
  if (!std::isfinite(g2)) {
    return 0.0;
  }
  return (1.0 - beta) * g1 * g1 / (2.0 * g2);
}

struct SecondOrderConstants {
  /// NaN when the severity has no tail index or beta < 1.
  double c_beta = std::numeric_limits<double>::quiet_NaN();
  double c_tilde = 0.0;
  /// E[X] E[N(N-1)]; +infinity in the infinite-mean case.
  double limit_constant = 0.0;
  bool finite_mean = true;
};

inline SecondOrderConstants second_order_constants(const CompoundModel& model) {
  SecondOrderConstants out;
  const double en = model.frequency.mean();
  const double en2 = model.frequency.factorial_moment2();
  const double ex = model.severity.mean();
  out.finite_mean = std::isfinite(ex);
  if (const auto a = model.severity.tail_index()) {
    const double beta = 1.0 / *a;
    if (beta >= 1.0) {
      out.c_beta = c_beta(beta);
    }
  }
  if (out.finite_mean) {
    out.c_tilde = ex * en2 / en;
    out.limit_constant = ex * en2;
  } else {
    if (!std::isfinite(out.c_beta)) {
      throw DomainError("second_order_constants: infinite mean needs a tail index a <= 1");
    }
    out.c_tilde = out.c_beta * en2 / en;
    out.limit_constant = std::numeric_limits<double>::infinity();
  }
  return out;
}

struct SecondOrderOptions {
  /// When false g_1 is forced to 0 and the result equals the first order.
  bool correction = true;
};

/// Second-order single-loss VaR
///   F^{-1}(1 - (1 - alpha)/E[N] / (1 + c~ g_1(F^{-1}(alpha~)))),
/// remainder dropped. g_1 = f/(1-F) for finite mean, f * int_0^x (1-F) / (1-F)
/// otherwise.
inline SlaResult sla_var_second_order(const CompoundModel& model, double alpha,
                                      const SecondOrderOptions& opts = {}) {
  if (!model.severity.has_density()) {
    throw UnsupportedError("sla_var_second_order: severity needs a density");
  }
  SlaResult r;
  r.alpha = alpha;
  const double level = sla_severity_level(model, alpha);
  r.var_first = model.severity.quantile(level);
  const auto k = second_order_constants(model);
  const double x = r.var_first;
  double g1 = 0.0;
  if (opts.correction) {
    const double f = model.severity.density(x);
    const double sf = model.severity.survival(x);
    g1 = k.finite_mean ? f / sf : f * model.severity.limited_expectation(x) / sf;
  }
  const double factor = 1.0 + k.c_tilde * g1;
  r.diagnostics["alpha_tilde"] = level;
  r.diagnostics["g1"] = g1;
  r.diagnostics["c_tilde"] = k.c_tilde;
  r.diagnostics["c_beta"] = k.c_beta;
  r.diagnostics["limit_constant"] = k.limit_constant;
  if (const auto a = model.severity.tail_index()) {
    r.diagnostics["tail_index"] = *a;
  }
  r.diagnostics["correction_factor"] = factor;
  if (!(factor > 0.0)) {
    throw DegenerateCorrectionError("sla_var_second_order: correction factor <= 0; use the first order");
  }
  r.var_second = model.severity.quantile(1.0 - (1.0 - level) / factor);
  return r;
}

/// K = int_1^inf s^(e - 2) w(1 - 1/s) ds for exponent e = 1/a < 1.
/// With t = 1/s and t = u^(1/(1-e)) this is (1/(1-e)) int_0^1 w(1 - u^(1/(1-e))) du.
inline double spectral_constant(double exponent, const SpectrumFn& w) {
  if (!(exponent < 1.0)) {
    throw DomainError("spectral_constant: exponent 1/a must be < 1");
  }
  const double p = 1.0 / (1.0 - exponent);
  return p * integrate([&](double u) { return w(1.0 - std::pow(u, p)); }, 0.0, 1.0, {1e-10});
}

struct EsSrm {
  double es = 0.0;
  double srm = 0.0;
};

/// ES and SRM scaled off the first-order VaR for regularly varying
/// severities: ES = VaR a/(a - 1), SRM = K(1/a, w) VaR.
inline EsSrm sla_es_srm(const CompoundModel& model, double alpha, const SpectrumFn& w) {
  const auto a = model.severity.tail_index();
  if (!a) {
    throw UnsupportedError("sla_es_srm: severity has no regular-variation index");
  }
  if (!(*a > 1.0)) {
    throw DomainError("sla_es_srm: tail index must exceed 1");
  }
  const double var = sla_var_first_order(model, alpha);
  return {var * *a / (*a - 1.0), var * spectral_constant(1.0 / *a, w)};
}

/// (1 - F^{*2}(x)) / (1 - F(x)), with
/// 1 - F^{*2}(x) = (1 - F(x)) + int_0^x (1 - F(x - y)) f(y) dy split at x/2.
inline double subexp_tail_ratio(const SeverityModel& sev, double x, double rel_tol = 1e-6) {
  if (!std::isfinite(x) || x < 0.0) {
    throw DomainError("subexp_tail_ratio: x must be non-negative");
  }
  if (!sev.has_density()) {
    throw UnsupportedError("subexp_tail_ratio: severity needs a density");
  }
  if (x == 0.0) {
    return 1.0;
  }
  const QuadratureOptions q{rel_tol};
  auto integrand = [&](double y) { return sev.survival(x - y) * sev.density(y); };
  const double conv = integrate(integrand, 0.0, 0.5 * x, q) + integrate(integrand, 0.5 * x, x, q);
  const double sf = sev.survival(x);
  return (sf + conv) / sf;
}

}  // namespace lda
