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

#include "collisim/linalg.hpp"

#include <bit>
#include <cmath>
#include <string>
#include <vector>

#include "collisim/errors.hpp"

namespace collisim {

namespace op {

CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

CMatrix sigma_plus() {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

CMatrix sigma_minus() {
    CMatrix m = CMatrix::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

CMatrix sigma_x() {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

CMatrix sigma_y() {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = Complex(0.0, -1.0);
    m(1, 0) = Complex(0.0, 1.0);
    return m;
}

CMatrix sigma_z() {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

CMatrix embed(const CMatrix& single, std::size_t site, std::size_t n_qubits) {
    if (site >= n_qubits) {
        throw InvalidArgument("embed: site " + std::to_string(site) + " outside register of " +
                              std::to_string(n_qubits) + " qubits");
    }
    CMatrix out = CMatrix::Identity(1, 1);
    for (std::size_t q = 0; q < n_qubits; ++q) {
        out = kron(out, q == site ? single : identity(2));
    }
    return out;
}

}  // namespace op

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

bool is_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

CMatrix hermitian_checked(CMatrix m, double tol) {
    if (!is_hermitian(m, tol)) {
        throw InvalidArgument("matrix is not Hermitian within tolerance");
    }
    return m;
}

PhysicalityReport physicality(const CMatrix& m) {
    PhysicalityReport r;
    if (m.rows() != m.cols() || m.rows() == 0) {
        r.hermiticity_error = INFINITY;
        r.trace_error = INFINITY;
        r.min_eigenvalue = -INFINITY;
        return r;
    }
    r.hermiticity_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
    r.trace_error = std::abs(m.trace() - Complex(1.0, 0.0));
    if (m.rows() == 2) {
        const double a = m(0, 0).real();
        const double d = m(1, 1).real();
        const double off = std::abs(0.5 * (m(0, 1) + std::conj(m(1, 0))));
        r.min_eigenvalue = 0.5 * (a + d) - std::hypot(0.5 * (a - d), off);
    } else {
        const CMatrix herm = 0.5 * (m + m.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
        r.min_eigenvalue = es.eigenvalues().minCoeff();
    }
    return r;
}

DensityMatrix::DensityMatrix(CMatrix m) : m_(std::move(m)) {
    const auto n = static_cast<std::size_t>(m_.rows());
    if (m_.rows() != m_.cols() || n == 0 || !std::has_single_bit(n)) {
        throw InvalidArgument("density matrix must be square with power-of-two dimension");
    }
    log2_ = std::countr_zero(n);
    const PhysicalityReport r = physicality(m_);
    if (r.hermiticity_error > kHermitianTol) {
        throw InvalidArgument("density matrix not Hermitian (error " +
                              std::to_string(r.hermiticity_error) + ")");
    }
    if (r.trace_error > kTraceTol) {
        throw InvalidArgument("density matrix trace differs from 1 by " +
                              std::to_string(r.trace_error));
    }
    if (r.min_eigenvalue < kEigenvalueFloor) {
        throw InvalidArgument("density matrix has negative eigenvalue " +
                              std::to_string(r.min_eigenvalue));
    }
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

CMatrix partial_trace(const CMatrix& m, std::size_t keep, std::span<const std::size_t> dims) {
    if (keep >= dims.size()) {
        throw InvalidArgument("partial_trace: kept subsystem index out of range");
    }
    std::size_t total = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw InvalidArgument("partial_trace: zero subsystem dimension");
        total *= d;
    }
    if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != total) {
        throw InvalidArgument("partial_trace: product of dims " + std::to_string(total) +
                              " does not match matrix dimension " + std::to_string(m.rows()));
    }
    // Row index = (left * dk + k) * right + rest, with left/right the
    // combined dimensions before and after the kept subsystem.
    std::size_t left = 1;
    for (std::size_t i = 0; i < keep; ++i) left *= dims[i];
    const std::size_t dk = dims[keep];
    const std::size_t right = total / (left * dk);

    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    for (std::size_t a = 0; a < dk; ++a) {
        for (std::size_t b = 0; b < dk; ++b) {
            Complex acc = 0.0;
            for (std::size_t l = 0; l < left; ++l) {
                for (std::size_t r = 0; r < right; ++r) {
                    const auto row = static_cast<Eigen::Index>((l * dk + a) * right + r);
                    const auto col = static_cast<Eigen::Index>((l * dk + b) * right + r);
                    acc += m(row, col);
                }
            }
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
        }
    }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t keep,
                            std::span<const std::size_t> dims) {
    return DensityMatrix(partial_trace(rho.matrix(), keep, dims));
}

CMatrix herm_unitary(const CMatrix& h, double t) {
    if (!is_hermitian(h)) {
        throw InvalidArgument("herm_unitary: generator is not Hermitian");
    }
    const CMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
    if (es.info() != Eigen::Success) {
        throw InvalidArgument("herm_unitary: eigendecomposition failed");
    }
    const Eigen::VectorXd& w = es.eigenvalues();
    CVector phases(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        phases(i) = std::exp(Complex(0.0, -w(i) * t));
    }
    const CMatrix& v = es.eigenvectors();
    return v * phases.asDiagonal() * v.adjoint();
}

CVector vec(const CMatrix& m) { return m.reshaped(); }

CMatrix unvec(const CVector& v, Eigen::Index n) {
    if (v.size() != n * n) throw InvalidArgument("unvec: length is not n*n");
    return v.reshaped(n, n);
}

CMatrix superop(const CMatrix& left, const CMatrix& right) {
    return kron(right.transpose(), left);
}

CMatrix hamiltonian_superop(const CMatrix& h) {
    const CMatrix id = CMatrix::Identity(h.rows(), h.cols());
    return Complex(0.0, -1.0) * (superop(h, id) - superop(id, h));
}

CMatrix lindblad_dissipator(const CMatrix& o) {
    const CMatrix id = CMatrix::Identity(o.rows(), o.cols());
    const CMatrix od = o.adjoint();
    const CMatrix odo = od * o;
    return 2.0 * superop(o, od) - superop(odo, id) - superop(id, odo);
}

DensityMatrix liouvillian_steady_state(const CMatrix& l) {
    if (l.rows() != 4 || l.cols() != 4) {
        throw InvalidArgument("liouvillian_steady_state: expected a 4x4 superoperator");
    }
    Eigen::JacobiSVD<CMatrix> svd(l, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();  // descending
    const double scale = s(0);
    const double null_tol = 1e-10 * scale;
    if (scale == 0.0 || s(3) > null_tol || s(2) <= null_tol) {
        throw DegenerateSteadyState("Liouvillian null space is not one-dimensional (singular values " +
                                    std::to_string(s(2)) + ", " + std::to_string(s(3)) + ")");
    }
    CMatrix rho = unvec(svd.matrixV().col(3), 2);
    const Complex tr = rho.trace();
    if (std::abs(tr) < 1e-14) {
        throw DegenerateSteadyState("Liouvillian null vector is traceless");
    }
    rho /= tr;
    // Remove the roundoff-level anti-Hermitian part left by the SVD.
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho));
}

}  // namespace collisim
