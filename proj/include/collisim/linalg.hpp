// Copyright 2026 The collisim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COLLISIM_LINALG_HPP_
#define COLLISIM_LINALG_HPP_

// Dense complex linear algebra for registers of at most 5 qubits.
//
// Conventions used throughout the project:
//   * single-qubit basis order is (|e>, |g>), so sigma_z = diag(1, -1),
//     sigma_plus = |e><g| and sigma_minus = |g><e|;
//   * tensor order is (probe, reservoir 1, ..., reservoir N);
//   * superoperators act on column-stacked vectorizations,
//     vec(A X B) = (B^T (x) A) vec(X).

#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace collisim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kEigenvalueFloor = -1e-9;

namespace op {

CMatrix identity(Eigen::Index n);
CMatrix sigma_plus();
CMatrix sigma_minus();
CMatrix sigma_x();
CMatrix sigma_y();
CMatrix sigma_z();

// `single` acting on qubit `site` of an `n_qubits` register.
CMatrix embed(const CMatrix& single, std::size_t site, std::size_t n_qubits);

}  // namespace op

CMatrix kron(const CMatrix& a, const CMatrix& b);

bool is_hermitian(const CMatrix& m, double tol = kHermitianTol);

// Returns `m` unchanged after checking conjugate symmetry; throws InvalidArgument otherwise.
CMatrix hermitian_checked(CMatrix m, double tol = kHermitianTol);

struct PhysicalityReport {
    double hermiticity_error = 0.0;  // max |m - m^dagger|
    double trace_error = 0.0;        // |Tr m - 1|
    double min_eigenvalue = 0.0;

    bool ok() const {
        return hermiticity_error <= kHermitianTol && trace_error <= kTraceTol &&
               min_eigenvalue >= kEigenvalueFloor;
    }
};

PhysicalityReport physicality(const CMatrix& m);

/// Validated density matrix on a register of 2^k levels.
///
/// Construction checks Hermiticity (1e-12), unit trace (1e-9) and an
/// eigenvalue floor of -1e-9; violations throw InvalidArgument.
class DensityMatrix {
  public:
    explicit DensityMatrix(CMatrix m);

    const CMatrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }
    int dim_log2() const { return log2_; }
    Complex operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }
    double purity() const;

  private:
    CMatrix m_;
    int log2_ = 0;
};

// Reduced matrix on subsystem `keep` of a register with local dimensions `dims`.
// Works for arbitrary (not necessarily physical) operators.
CMatrix partial_trace(const CMatrix& m, std::size_t keep, std::span<const std::size_t> dims);
DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t keep,
                            std::span<const std::size_t> dims);

/// exp(-i h t) for Hermitian h, computed exactly from the eigendecomposition.
CMatrix herm_unitary(const CMatrix& h, double t);

CVector vec(const CMatrix& m);
CMatrix unvec(const CVector& v, Eigen::Index n);

// X -> left * X * right
CMatrix superop(const CMatrix& left, const CMatrix& right);
// X -> -i [h, X]
CMatrix hamiltonian_superop(const CMatrix& h);
// L[o] X = 2 o X o^dagger - o^dagger o X - X o^dagger o
CMatrix lindblad_dissipator(const CMatrix& o);

/// Unique steady state of a 4x4 single-qubit Liouvillian.
///
/// The null vector is taken from the SVD; the call throws
/// DegenerateSteadyState unless exactly one singular value lies below
/// 1e-10 times the largest one.
DensityMatrix liouvillian_steady_state(const CMatrix& l);

}  // namespace collisim

#endif  // COLLISIM_LINALG_HPP_
