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
#include "eagleson/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace eagleson {

namespace {

struct SimpsonState {
  const std::function<double(double)>* f;
  double tol_total;
  double span;
  double error_acc = 0.0;
  bool converged = true;
};

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(SimpsonState& st, double a, double b, double fa, double fm,
             double fb, double whole, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = (*st.f)(lm);
  const double frm = (*st.f)(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double diff = left + right - whole;
  // local tolerance proportional to the subinterval width
  const double tol_here = st.tol_total * (b - a) / st.span;
  if (std::abs(diff) <= 15.0 * tol_here || depth <= 0) {
    if (depth <= 0 && std::abs(diff) > 15.0 * tol_here) st.converged = false;
    st.error_acc += std::abs(diff) / 15.0;
    return left + right + diff / 15.0;
  }
  return adapt(st, a, m, fa, flm, fm, left, depth - 1) +
         adapt(st, m, b, fm, frm, fb, right, depth - 1);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double tol, int max_depth) {
  if (!(b > a)) return {0.0, 0.0, true};
  SimpsonState st{&f, tol, b - a};
  const double fa = f(a);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = simpson(fa, fm, fb, b - a);
  const double value = adapt(st, a, b, fa, fm, fb, whole, max_depth);
  return {value, st.error_acc, st.converged};
}

double bisect_increasing(const std::function<double(double)>& f, double lo,
                         double hi, double target, double xtol, int max_iter) {
  double flo = f(lo) - target;
  double fhi = f(hi) - target;
  if (flo > 0.0 || fhi < 0.0)
    throw std::runtime_error("bisect_increasing: bracket does not straddle target");
  for (int i = 0; i < max_iter && hi - lo > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid) - target;
    if (fmid < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace eagleson
