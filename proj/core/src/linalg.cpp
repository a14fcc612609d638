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

#include "nvqoc/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace nvqoc {

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

void require_hermitian(const CMatrix& m, std::string_view what, double tol) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix is not square");
  }
  if (!all_finite(m)) {
    throw std::invalid_argument(std::string(what) + ": matrix has non-finite entries");
  }
  if (!is_hermitian(m, tol)) {
    throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
  }
}

EigenSystem hermitian_eigen(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw NumericError("Hermitian eigendecomposition did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix kron(const CMatrix& a, const CMatrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

double unitarity_error(const CMatrix& u) {
  if (u.size() == 0) return 0.0;
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

bool all_finite(const CMatrix& m) {
  return m.unaryExpr([](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); })
      .all();
}

bool all_finite(const RMatrix& m) { return m.allFinite(); }

}  // namespace nvqoc
