// Copyright 2026 The nvqoc Authors
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

#include "nvqoc/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace nvqoc {

void NelderMeadOptions::validate() const {
  if (max_evaluations < 1) throw std::invalid_argument("NelderMeadOptions: max_evaluations must be >= 1");
  if (!(initial_step > 0.0)) throw std::invalid_argument("NelderMeadOptions: initial_step must be positive");
  if (!(x_tol >= 0.0) || !(f_tol >= 0.0)) throw std::invalid_argument("NelderMeadOptions: negative tolerance");
}

namespace {

class Simplex {
 public:
  Simplex(const std::function<double(const RVector&)>& f, int budget, NelderMeadResult& out)
      : f_(f), budget_(budget), out_(out) {}

  // Evaluates f(x) unless the budget is spent.
  bool eval(const RVector& x, double& fx) {
    if (out_.evaluations >= budget_) return false;
    fx = f_(x);
    ++out_.evaluations;
    if (std::isnan(fx)) {
      ++out_.nan_evaluations;
      fx = std::numeric_limits<double>::infinity();
    }
    best_ = std::min(best_, fx);
    out_.trace.push_back(best_);
    return true;
  }

 private:
  const std::function<double(const RVector&)>& f_;
  int budget_;
  NelderMeadResult& out_;
  double best_ = std::numeric_limits<double>::infinity();
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const RVector&)>& f, const RVector& x0,
                             const NelderMeadOptions& opts) {
  opts.validate();
  const int n = static_cast<int>(x0.size());
  if (n < 1) throw std::invalid_argument("nelder_mead: empty parameter vector");
  if (opts.max_evaluations < n + 1) {
    throw std::invalid_argument("nelder_mead: budget " + std::to_string(opts.max_evaluations) +
                                " is smaller than the simplex size " + std::to_string(n + 1));
  }
  const double nd = static_cast<double>(n);
  const double rho = 1.0;
  const double chi = opts.adaptive ? 1.0 + 2.0 / nd : 2.0;
  const double gamma = opts.adaptive ? 0.75 - 0.5 / nd : 0.5;
  const double sigma = opts.adaptive ? 1.0 - 1.0 / nd : 0.5;

  NelderMeadResult out;
  Simplex eval(f, opts.max_evaluations, out);

  std::vector<RVector> pts(static_cast<std::size_t>(n) + 1, x0);
  std::vector<double> fv(static_cast<std::size_t>(n) + 1);
  eval.eval(pts[0], fv[0]);
  for (int i = 0; i < n; ++i) {
    pts[i + 1][i] += opts.initial_step;
    eval.eval(pts[i + 1], fv[i + 1]);
  }

  std::vector<std::size_t> order(pts.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<RVector> p2;
    std::vector<double> f2;
    for (auto i : order) {
      p2.push_back(pts[i]);
      f2.push_back(fv[i]);
    }
    pts = std::move(p2);
    fv = std::move(f2);
  };

  out.stop_reason = StopReason::budget_exhausted;
  while (true) {
    sort_simplex();
    double diameter = 0.0;
    for (int i = 1; i <= n; ++i) diameter = std::max(diameter, (pts[i] - pts[0]).cwiseAbs().maxCoeff());
    const double spread = fv[n] - fv[0];
    if (diameter <= opts.x_tol || spread <= opts.f_tol * (1.0 + std::abs(fv[0]))) {
      out.stop_reason = StopReason::simplex_converged;
      break;
    }
    if (out.evaluations >= opts.max_evaluations) break;
    ++out.iterations;

    RVector centroid = RVector::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[i];
    centroid /= nd;

    const RVector xr = centroid + rho * (centroid - pts[n]);
    double fr = 0.0;
    if (!eval.eval(xr, fr)) break;

    if (fr < fv[0]) {
      const RVector xe = centroid + chi * (xr - centroid);
      double fe = 0.0;
      if (eval.eval(xe, fe) && fe < fr) {
        pts[n] = xe;
        fv[n] = fe;
      } else {
        pts[n] = xr;
        fv[n] = fr;
      }
      continue;
    }
    if (fr < fv[n - 1]) {
      pts[n] = xr;
      fv[n] = fr;
      continue;
    }

    const bool outside = fr < fv[n];
    const RVector xc = outside ? RVector(centroid + gamma * (xr - centroid))
                               : RVector(centroid + gamma * (pts[n] - centroid));
    double fc = 0.0;
    if (!eval.eval(xc, fc)) break;
    if ((outside && fc <= fr) || (!outside && fc < fv[n])) {
      pts[n] = xc;
      fv[n] = fc;
      continue;
    }

    bool spent = false;
    for (int i = 1; i <= n; ++i) {
      pts[i] = pts[0] + sigma * (pts[i] - pts[0]);
      if (!eval.eval(pts[i], fv[i])) {
        // Keep the simplex consistent: an unevaluated vertex must not win.
        fv[i] = std::numeric_limits<double>::infinity();
        spent = true;
      }
    }
    if (spent) break;
  }

  sort_simplex();
  out.x = pts[0];
  out.f = fv[0];
  return out;
}

}  // namespace nvqoc
