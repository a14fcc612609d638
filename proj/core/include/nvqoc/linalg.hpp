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

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace nvqoc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Raised when a computation produces or meets non-finite values or loses
/// unitarity. Precondition violations use std::invalid_argument instead.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for combinations the library declines to support (for example an
/// analytic gradient of the Fisher cost).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Element-wise Hermiticity check. The tolerance is scaled by the largest
/// entry magnitude when that exceeds one, so GHz-scale drifts stored in rad/us
/// are judged on the same relative footing as O(1) matrices.
bool is_hermitian(const CMatrix& m, double tol = 1e-12);

/// Throws std::invalid_argument naming `what` if `m` is not square Hermitian.
void require_hermitian(const CMatrix& m, std::string_view what, double tol = 1e-12);

struct EigenSystem {
  RVector values;   // ascending
  CMatrix vectors;  // columns are orthonormal eigenvectors
};

EigenSystem hermitian_eigen(const CMatrix& h);

CMatrix kron(const CMatrix& a, const CMatrix& b);

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

/// max |(U^dagger U - I)_ij|
double unitarity_error(const CMatrix& u);

bool all_finite(const CMatrix& m);
bool all_finite(const RMatrix& m);

inline Complex inner(const CVector& a, const CVector& b) { return a.dot(b); }  // <a|b>

}  // namespace nvqoc
