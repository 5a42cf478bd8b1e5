#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qkdmem {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. Everything in this project lives in
/// dimension <= a few thousand, so no sparsity or blocking anywhere.
struct CMat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<cplx> a;

    CMat() = default;
    CMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

    static CMat identity(std::size_t n);
    static CMat zero(std::size_t r, std::size_t c) { return CMat(r, c); }

    cplx& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    const cplx& at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    CMat adjoint() const;
    cplx trace() const;
    double max_abs_diff(const CMat& other) const;
    bool is_hermitian(double tol) const;
};

CMat operator*(const CMat& x, const CMat& y);
CMat operator+(const CMat& x, const CMat& y);
CMat operator-(const CMat& x, const CMat& y);
CMat operator*(cplx s, const CMat& x);

/// Kronecker product, left factor on the high-order index bits.
CMat kron(const CMat& x, const CMat& y);

CMat outer(const std::vector<cplx>& ket, const std::vector<cplx>& bra);

struct HermitianEig {
    std::vector<double> values;  // ascending
    CMat vectors;                // column k is the eigenvector for values[k]
};

/// Cyclic Jacobi diagonalization for Hermitian matrices. Input must be
/// Hermitian within roundoff; asserts square.
HermitianEig hermitian_eig(const CMat& m);

std::vector<double> hermitian_eigenvalues(const CMat& m);

}  // namespace qkdmem
