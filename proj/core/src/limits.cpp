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

#include "nvqoc/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nvqoc {

namespace {

void require_normalized(const CVector& psi, const char* what) {
  if (!psi.allFinite() || std::abs(psi.norm() - 1.0) > 1e-8) {
    throw std::invalid_argument(std::string("qsl_bhattacharyya: ") + what + " is not normalized");
  }
}

// Real Hilbert-Schmidt geometry on matrices viewed as vectors of 2 N^2 reals.
class RealSpan {
 public:
  // Adds m if it is independent of the span; returns the normalized element.
  bool add(const CMatrix& m, CMatrix* accepted = nullptr) {
    const double norm0 = m.norm();
    if (!(norm0 > 0.0)) return false;
    CMatrix r = m / norm0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis_) r -= (b.cwiseProduct(r.conjugate())).sum().real() * b;
    }
    const double res = r.norm();
    if (res <= kResidual) return false;
    r /= res;
    basis_.push_back(r);
    if (accepted) *accepted = r;
    return true;
  }

  const std::vector<CMatrix>& basis() const { return basis_; }
  std::size_t size() const { return basis_.size(); }

 private:
  static constexpr double kResidual = 1e-9;
  std::vector<CMatrix> basis_;
};

CMatrix traceless_skew(const CMatrix& h) {
  const Eigen::Index n = h.rows();
  const CMatrix t = h - (h.trace() / static_cast<double>(n)) * CMatrix::Identity(n, n);
  return kI * t;
}

}  // namespace

QslReport qsl_bhattacharyya(const CMatrix& h, const CVector& psi0, const CVector& psit) {
  require_hermitian(h, "qsl_bhattacharyya: H");
  if (psi0.size() != h.rows() || psit.size() != h.rows()) {
    throw std::invalid_argument("qsl_bhattacharyya: state dimension does not match H");
  }
  require_normalized(psi0, "initial state");
  require_normalized(psit, "target state");

  QslReport r;
  const CVector hpsi = h * psi0;
  const Complex mean = psi0.dot(hpsi);
  // ||(H - <H>) psi|| avoids the cancellation in <H^2> - <H>^2.
  r.delta_e = (hpsi - mean * psi0).norm();
  // atan2 of the parallel and perpendicular parts stays accurate near 0,
  // where arccos of the overlap loses half the digits.
  const Complex overlap = psi0.dot(psit);
  r.angle = std::atan2((psit - overlap * psi0).norm(), std::abs(overlap));
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (r.angle == 0.0) {
    r.t_qsl = 0.0;
  } else if (r.delta_e < 1e-12 * scale) {
    r.infinite = true;
    r.t_qsl = std::numeric_limits<double>::infinity();
  } else {
    r.t_qsl = r.angle / r.delta_e;
  }
  return r;
}

CMatrix qsl_surrogate(const Hamiltonian& sys, const PulseSet& pulses) {
  check_compatible(sys, pulses);
  RVector amps(pulses.n_controls());
  for (int i = 0; i < pulses.n_controls(); ++i) {
    Eigen::Index k = 0;
    pulses.amplitudes().row(i).cwiseAbs().maxCoeff(&k);
    amps[i] = pulses.amplitudes()(i, k);
  }
  return sys.at(amps);
}

ControllabilityReport controllability_rank(const CMatrix& drift, const std::vector<CMatrix>& controls) {
  const Eigen::Index n = drift.rows();
  if (n < 1 || drift.cols() != n) throw std::invalid_argument("controllability_rank: drift must be square");
  if (n > kMaxControllabilityDimension) {
    throw std::invalid_argument("controllability_rank: dimension " + std::to_string(n) + " exceeds the cap of " +
                                std::to_string(kMaxControllabilityDimension));
  }
  require_hermitian(drift, "controllability_rank: drift");
  for (const auto& c : controls) {
    if (c.rows() != n || c.cols() != n) throw std::invalid_argument("controllability_rank: dimension mismatch");
    require_hermitian(c, "controllability_rank: control");
  }

  const double scale = std::max(1.0, drift.cwiseAbs().maxCoeff());
  RealSpan span;
  auto seed = [&](const CMatrix& h) {
    const CMatrix g = traceless_skew(h);
    // Generators below round-off of the problem scale are treated as zero.
    if (g.norm() > 1e-12 * scale) span.add(g);
  };
  seed(drift);
  for (const auto& c : controls) seed(c);

  // Breadth-first closure: every new element is commuted with all earlier ones.
  const long long cap = static_cast<long long>(n * n) * static_cast<long long>(n * n);
  long long evaluations = 0;
  const std::size_t full = static_cast<std::size_t>(n * n - 1);
  for (std::size_t i = 1; i < span.size() && span.size() < full; ++i) {
    for (std::size_t j = 0; j < i && span.size() < full; ++j) {
      if (evaluations++ >= cap) break;
      span.add(commutator(span.basis()[i], span.basis()[j]));
    }
    if (evaluations >= cap) break;
  }

  ControllabilityReport r;
  r.lie_dim = static_cast<int>(span.size());
  r.full_dim = static_cast<int>(full);
  r.controllable = span.size() == full;
  return r;
}

}  // namespace nvqoc
