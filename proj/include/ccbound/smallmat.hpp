#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"

namespace ccbound {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Induced infinity norm (max absolute row sum).
inline double inf_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Dense real symmetric matrix.  Storage is symmetrized exactly on
/// construction, so entries(i,j) == entries(j,i) always holds bit-for-bit.
class SymMatrix {
public:
    SymMatrix() = default;

    explicit SymMatrix(const Matrix& m) {
        if (m.rows() != m.cols()) {
            throw domain_error("SymMatrix: input must be square");
        }
        m_ = 0.5 * (m + m.transpose());
    }

    static SymMatrix zero(int n) { return SymMatrix(Matrix::Zero(n, n)); }
    static SymMatrix identity(int n) { return SymMatrix(Matrix::Identity(n, n)); }

    int n() const { return static_cast<int>(m_.rows()); }
    const Matrix& mat() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

private:
    Matrix m_;
};

/// Result of a symmetric eigendecomposition: A = vectors * diag(values) * vectors^T,
/// eigenvalues ascending, eigenvector matrix orthogonal.
struct EigDecomp {
    Vector values;
    Matrix vectors;
};

inline EigDecomp sym_eig(const SymMatrix& A) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(A.mat());
    if (es.info() != Eigen::Success) {
        throw numeric_error("sym_eig: eigensolver did not converge");
    }
    return {es.eigenvalues(), es.eigenvectors()};
}

/// Solve A X = B with partial pivoting.  An exactly singular A raises
/// singular_matrix_error carrying the index of the vanished pivot.
inline Matrix solve(const Matrix& A, const Matrix& B) {
    if (A.rows() != A.cols()) {
        throw domain_error("solve: coefficient matrix must be square");
    }
    if (A.rows() != B.rows()) {
        throw domain_error("solve: dimension mismatch between A and B");
    }
    Eigen::PartialPivLU<Matrix> lu(A);
    const auto& u_diag = lu.matrixLU().diagonal();
    for (int k = 0; k < u_diag.size(); ++k) {
        if (u_diag(k) == 0.0) {
            throw singular_matrix_error(
                "solve: matrix is exactly singular at pivot " + std::to_string(k), k);
        }
    }
    return lu.solve(B);
}

/// Orthonormal eigenvectors of A whose eigenvalue magnitude is at most
/// tol * max(1, ||A||_inf); the count is the numeric multiplicity of zero.
inline std::vector<Vector> null_space(const SymMatrix& A, double tol) {
    const EigDecomp d = sym_eig(A);
    const double thresh = tol * std::max(1.0, inf_norm(A.mat()));
    std::vector<Vector> out;
    for (int j = 0; j < d.values.size(); ++j) {
        if (std::abs(d.values(j)) <= thresh) {
            out.push_back(d.vectors.col(j));
        }
    }
    return out;
}

/// Real eigenvalues of A * B^{-1}, sorted ascending.  The spectrum is real in
/// exact arithmetic for the matrix pairs met here; any eigenvalue with
/// |Im| > tol_imag * (1 + |Re|) raises spectral_reality_error.
inline Vector pair_eigenvalues(const Matrix& A, const Matrix& B, double tol_imag) {
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows()) {
        throw domain_error("pair_eigenvalues: matrices must be square and conformable");
    }
    // A * B^{-1} = (B^{-T} A^T)^T, so one transposed solve forms the product.
    const Matrix C = solve(B.transpose(), A.transpose()).transpose();
    Eigen::EigenSolver<Matrix> es(C);
    if (es.info() != Eigen::Success) {
        throw numeric_error("pair_eigenvalues: eigensolver did not converge");
    }
    Vector out(C.rows());
    for (int j = 0; j < C.rows(); ++j) {
        const std::complex<double> ev = es.eigenvalues()(j);
        if (std::abs(ev.imag()) > tol_imag * (1.0 + std::abs(ev.real()))) {
            throw spectral_reality_error(
                "pair_eigenvalues: eigenvalue has non-negligible imaginary part",
                ev.real(), ev.imag());
        }
        out(j) = ev.real();
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace ccbound
