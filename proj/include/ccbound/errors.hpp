#pragma once

#include <stdexcept>
#include <string>

namespace ccbound {

/// Base class of every exception thrown by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument is outside the admissible domain (non-finite input, bad index, ...).
class domain_error : public error {
public:
    using error::error;
};

/// Iterative numeric kernel failed to converge (should not occur for valid input).
class numeric_error : public error {
public:
    using error::error;
};

/// Exactly singular matrix met in a linear solve; carries the offending pivot.
class singular_matrix_error : public error {
public:
    singular_matrix_error(const std::string& what, int pivot)
        : error(what), pivot_(pivot) {}
    int pivot() const noexcept { return pivot_; }

private:
    int pivot_;
};

/// An eigenvalue that is real in theory came out with a significant imaginary part.
class spectral_reality_error : public error {
public:
    spectral_reality_error(const std::string& what, double re, double im)
        : error(what), re_(re), im_(im) {}
    double real_part() const noexcept { return re_; }
    double imag_part() const noexcept { return im_; }

private:
    double re_, im_;
};

/// Boundary-condition matrices violate the rank or conjointness requirements.
class invalid_boundary_condition : public error {
public:
    using error::error;
};

/// The Moebius denominator is too ill-conditioned to form Psi = N * D^{-1}.
class singular_extraction_error : public error {
public:
    using error::error;
};

/// The phase-sum update across one interval failed even after subdividing.
class phase_step_error : public error {
public:
    using error::error;
};

/// The indexing function came out non-integer (mesh too coarse or a missed pole).
class index_integrity_error : public error {
public:
    using error::error;
};

/// No eigenvalue of the requested index exists below the search ceiling.
class index_out_of_range : public error {
public:
    using error::error;
};

/// Eigenvalue iteration stagnated or its result failed index validation.
class convergence_error : public error {
public:
    using error::error;
};

/// A computed eigenfunction norm came out non-positive.
class normalization_error : public error {
public:
    using error::error;
};

/// Requested mesh tolerance cannot be met within the interval budget.
class tolerance_infeasible : public error {
public:
    using error::error;
};

/// Malformed problem configuration.
class config_error : public error {
public:
    using error::error;
};

} // namespace ccbound
