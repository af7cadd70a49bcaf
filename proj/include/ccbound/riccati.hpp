#pragma once

#include <cmath>
#include <utility>

#include "cp_step.hpp"

namespace ccbound {

/// Origin of a propagated state: from the left endpoint a moving right, or
/// from the right endpoint b moving left.
enum class Direction { left, right };

/// R-matrix state Psi = Y (Y')^{-1} carried as the projective pair
/// (num, den) with Psi = num * den^{-1}.  The pair form makes the Moebius
/// update Psi(x_{i+1}) = [W + U Psi][W' + U' Psi]^{-1} a plain linear map on
/// (num, den), so poles of Psi (den singular) pass through without special
/// handling; only extraction requires an invertible den.
///
/// The energy derivative is carried alongside as the pair derivative
/// (dnum, dden); at any point where den is invertible,
/// dPsi/dE = (dnum - Psi dden) den^{-1}.
class RiccatiState {
public:
    RiccatiState(Direction dir, double x, Matrix num, Matrix den)
        : dir_(dir), x_(x),
          num_(std::move(num)), den_(std::move(den)),
          dnum_(Matrix::Zero(num_.rows(), num_.cols())),
          dden_(Matrix::Zero(num_.rows(), num_.cols())) {}

    Direction direction() const { return dir_; }
    double x() const { return x_; }
    int n() const { return static_cast<int>(num_.rows()); }

    const Matrix& num() const { return num_; }
    const Matrix& den() const { return den_; }
    const Matrix& dnum() const { return dnum_; }
    const Matrix& dden() const { return dden_; }

    /// Reciprocal condition estimate of den; extraction is refused below 1e-12
    /// (condition number above 1e12).
    bool extractable(double rcond_min = 1e-12) const {
        Eigen::PartialPivLU<Matrix> lu(den_);
        for (int k = 0; k < den_.rows(); ++k) {
            if (lu.matrixLU()(k, k) == 0.0) return false;
        }
        return lu.rcond() >= rcond_min;
    }

    /// Psi = num * den^{-1}, symmetrized.  Near-singular den raises
    /// singular_extraction_error; the caller is expected to move the
    /// evaluation point.
    SymMatrix psi() const {
        check_extractable();
        return SymMatrix(solve(den_.transpose(), num_.transpose()).transpose());
    }

    /// dPsi/dE at the current point, symmetrized.
    SymMatrix psi_e() const {
        check_extractable();
        const Matrix p = solve(den_.transpose(), num_.transpose()).transpose();
        const Matrix rhs = dnum_ - p * dden_;
        return SymMatrix(solve(den_.transpose(), rhs.transpose()).transpose());
    }

    /// Advance across one interval.  The effective blocks (u, w, up, wp) map
    /// (num, den) -> (u num + w den, up num + wp den); the derivative pair is
    /// advanced by the product rule and everything is jointly renormalized.
    void advance(const Matrix& u, const Matrix& w, const Matrix& up, const Matrix& wp,
                 const Matrix& du, const Matrix& dw, const Matrix& dup, const Matrix& dwp,
                 double dx) {
        Matrix num_new = u * num_ + w * den_;
        Matrix den_new = up * num_ + wp * den_;
        Matrix dnum_new = u * dnum_ + w * dden_ + du * num_ + dw * den_;
        Matrix dden_new = up * dnum_ + wp * dden_ + dup * num_ + dwp * den_;
        const double scale = std::max(num_new.cwiseAbs().maxCoeff(),
                                      den_new.cwiseAbs().maxCoeff());
        if (scale > 0.0 && std::isfinite(scale)) {
            num_new /= scale;
            den_new /= scale;
            dnum_new /= scale;
            dden_new /= scale;
        }
        num_ = std::move(num_new);
        den_ = std::move(den_new);
        dnum_ = std::move(dnum_new);
        dden_ = std::move(dden_new);
        x_ += dx;
    }

    /// Rescale the pair (test hook for the projective-invariance property).
    void rescale(double s) {
        num_ *= s;
        den_ *= s;
        dnum_ *= s;
        dden_ *= s;
    }

private:
    void check_extractable() const {
        if (!extractable()) {
            throw singular_extraction_error(
                "riccati: Moebius denominator is singular at x = " + std::to_string(x_));
        }
    }

    Direction dir_;
    double x_;
    Matrix num_, den_, dnum_, dden_;
};

namespace detail {

inline void check_bc_pair(const Matrix& M1, const Matrix& M2, const char* side) {
    if (M1.rows() != M1.cols() || M2.rows() != M2.cols() || M1.rows() != M2.rows()) {
        throw invalid_boundary_condition(std::string("riccati: ") + side +
                                         " boundary matrices must be square n x n");
    }
    if (!conjoined(M1, M2)) {
        throw invalid_boundary_condition(std::string("riccati: ") + side +
                                         " boundary pair violates conjointness");
    }
    if (!full_rank_pair(M1, M2)) {
        throw invalid_boundary_condition(std::string("riccati: ") + side +
                                         " boundary pair is rank deficient");
    }
}

} // namespace detail

/// Left state at x = a for A1 Y(a) + A2 Y'(a) = 0: the solution family
/// Y(a) = A2, Y'(a) = -A1 gives the pair (A2, -A1); no inversion is formed,
/// so Neumann conditions (singular A1) are representable.
inline RiccatiState init_left(const Matrix& A1, const Matrix& A2, double x_start = 0.0) {
    detail::check_bc_pair(A1, A2, "left");
    return RiccatiState(Direction::left, x_start, A2, -A1);
}

/// Right state at x = b for B1 Y(b) + B2 Y'(b) = 0.
inline RiccatiState init_right(const Matrix& B1, const Matrix& B2, double x_start = 0.0) {
    detail::check_bc_pair(B1, B2, "right");
    return RiccatiState(Direction::right, x_start, B2, -B1);
}

/// Advance a left state across [x, x+h].
inline RiccatiState step_left(const RiccatiState& state, const CpStep& s) {
    if (state.direction() != Direction::left) {
        throw domain_error("step_left: state does not originate at the left end");
    }
    RiccatiState out = state;
    out.advance(s.U, s.W, s.Up, s.Wp, s.dU, s.dW, s.dUp, s.dWp, s.h);
    return out;
}

/// Advance a right state across [x-h, x].  The inverse transfer map,
///   Psi(x_{i-1}) = [-W + W' Psi(x_i)][U - U' Psi(x_i)]^{-1},
/// uses the symmetry of the constant-potential blocks.
inline RiccatiState step_right(const RiccatiState& state, const CpStep& s) {
    if (state.direction() != Direction::right) {
        throw domain_error("step_right: state does not originate at the right end");
    }
    RiccatiState out = state;
    out.advance(s.Wp, -s.W, -s.Up, s.U, s.dWp, -s.dW, -s.dUp, s.dU, -s.h);
    return out;
}

inline SymMatrix extract_psi(const RiccatiState& state) { return state.psi(); }

/// Forward propagation of the derivative matrix across one interval:
/// Y'(x_{i+1}) = (U' Psi(x_i) + W') Y'(x_i), with Psi at the interval's left end.
inline Matrix propagate_yprime(const Matrix& yp, const SymMatrix& psi_at_left,
                               const CpStep& s) {
    return (s.Up * psi_at_left.mat() + s.Wp) * yp;
}

/// Backward counterpart: Y'(x_{i-1}) = (U - U' Psi(x_i)) Y'(x_i), with Psi at
/// the interval's right end.
inline Matrix propagate_yprime_back(const Matrix& yp, const SymMatrix& psi_at_right,
                                    const CpStep& s) {
    return (s.U - s.Up * psi_at_right.mat()) * yp;
}

} // namespace ccbound
