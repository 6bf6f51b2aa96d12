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
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lda/errors.hpp"

namespace lda {

struct QuadratureOptions {
  double rel_tol = 1e-6;
  unsigned max_depth = 30;
  /// Absolute floor; integrals smaller than this are accepted as converged.
  double abs_floor = 1e-300;
};

/// Adaptive 15-point Gauss-Kronrod on [a, b] (b may be +infinity).
/// Throws NumericError carrying the achieved relative tolerance when the
/// estimated error stays above `opts.rel_tol`.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
  if (a == b) {
    return 0.0;
  }
  double err = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, opts.max_depth, opts.rel_tol, &err, &l1);
  const double scale = std::max(std::abs(value), opts.abs_floor);
  if (!std::isfinite(value) || err > 10.0 * opts.rel_tol * scale) {
    const double achieved = std::isfinite(value) ? err / scale : std::numeric_limits<double>::infinity();
    throw NumericError("quadrature did not converge on [" + std::to_string(a) + ", " +
                           std::to_string(b) + "]",
                       achieved);
  }
  return value;
}

}  // namespace lda
