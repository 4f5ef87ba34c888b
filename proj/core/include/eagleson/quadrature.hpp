/*
   Copyright 2026 the eagleson authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#ifndef EAGLESON_QUADRATURE_HPP
#define EAGLESON_QUADRATURE_HPP

#include <functional>

namespace eagleson {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
};

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
/// Subdivision stops at depth `max_depth`; if any leaf hits the depth cap the
/// result is flagged converged = false and the leaf error is accumulated.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double tol = 1e-12, int max_depth = 48);

/// Finds x in [lo, hi] with f(x) = target by bisection; f must be monotone
/// increasing across the bracket. Throws std::runtime_error if the bracket
/// does not straddle the target.
double bisect_increasing(const std::function<double(double)>& f, double lo,
                         double hi, double target, double xtol = 1e-14,
                         int max_iter = 200);

}  // namespace eagleson

#endif  // EAGLESON_QUADRATURE_HPP
